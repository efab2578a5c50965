#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "models.hpp"
#include "oracles.hpp"
#include "pbnssa/errors.hpp"
#include "pbnssa/random_model.hpp"
#include "pbnssa/two_state.hpp"

using namespace pbnssa;
using fixtures::constant;
using fixtures::model_of;
using fixtures::negation_of;

namespace {

BitVector bits_of(std::initializer_list<int> xs) {
  BitVector b;
  for (const int x : xs) b.push_back(x != 0);
  return b;
}

TransitionCounts naive_counts(const BitVector& b, std::size_t first, std::size_t last) {
  TransitionCounts c;
  for (std::size_t i = first; i + 1 < last; ++i) {
    const int from = b[i];
    const int to = b[i + 1];
    (from ? (to ? c.n11 : c.n10) : (to ? c.n01 : c.n00))++;
  }
  return c;
}

}  // namespace

TEST(AlphaBeta, Examples) {
  const TwoStateParams a = estimate_alpha_beta(bits_of({0, 0, 1, 1, 0}));
  EXPECT_DOUBLE_EQ(a.alpha, 0.5);
  EXPECT_DOUBLE_EQ(a.beta, 0.5);
  EXPECT_FALSE(a.degenerate);
  const TwoStateParams b = estimate_alpha_beta(bits_of({0, 0, 0, 0}));
  EXPECT_EQ(b.alpha, 0.0);
  EXPECT_TRUE(b.degenerate);
  const TwoStateParams c = estimate_alpha_beta(bits_of({0, 1, 0, 1, 0, 1}));
  EXPECT_EQ(c.alpha, 1.0);
  EXPECT_EQ(c.beta, 1.0);
  EXPECT_FALSE(formulas_defined(c));
  EXPECT_THROW(estimate_alpha_beta(bits_of({1})), DomainError);
}

TEST(AlphaBeta, WordParallelCountsMatchNaive) {
  std::mt19937_64 gen(1);
  BitVector b;
  for (int i = 0; i < 700; ++i) b.push_back(gen() % 3 != 0);
  for (std::size_t first = 0; first < 200; first += 13) {
    for (std::size_t last = first; last <= b.size(); last += 29) {
      EXPECT_EQ(count_transitions(b, first, last), naive_counts(b, first, last)) << first << ".." << last;
    }
  }
}

TEST(AlphaBeta, ConvergesOnTwoStateChain) {
  const double alpha = 0.07;
  const double beta = 0.2;
  int good = 0;
  for (int run = 0; run < 100; ++run) {
    std::mt19937_64 gen(1000 + run);
    std::bernoulli_distribution up(alpha);
    std::bernoulli_distribution down(beta);
    BitVector b;
    bool x = false;
    for (int i = 0; i < 50000; ++i) {
      b.push_back(x);
      x = x ? !down(gen) : up(gen);
    }
    const TransitionCounts c = count_transitions(b, 0, b.size());
    const TwoStateParams p = params_from_counts(c);
    good += std::abs(p.alpha - alpha) < 3.0 * std::sqrt(alpha * (1 - alpha) / c.from_zero());
  }
  EXPECT_GE(good, 99);
}

TEST(Formulas, HighPrecisionValues) {
  const TwoStateParams p{0.1, 0.1, false};
  EXPECT_EQ(burn_in_M(p, 1e-10), oracle::burn_in(oracle::Decimal("0.1"), oracle::Decimal("0.1"),
                                                 oracle::Decimal("1e-10")));
  EXPECT_EQ(burn_in_M(p, 1e-10), 101U);
  EXPECT_EQ(sample_size_N(p, 0.01, 0.95),
            oracle::sample_size(oracle::Decimal("0.1"), oracle::Decimal("0.1"), oracle::Decimal("0.01"),
                                oracle::Decimal("0.95")));
  EXPECT_EQ(sample_size_N(p, 0.01, 0.95), 86433U);
  for (const double a : {0.013, 0.2, 0.45, 0.9}) {
    for (const double b : {0.007, 0.3, 0.8}) {
      const TwoStateParams q{a, b, false};
      const oracle::Decimal da(a);
      const oracle::Decimal db(b);
      EXPECT_EQ(burn_in_M(q, 1e-10), oracle::burn_in(da, db, oracle::Decimal(1e-10))) << a << "," << b;
      EXPECT_EQ(sample_size_N(q, 1e-3, 0.95),
                oracle::sample_size(da, db, oracle::Decimal(1e-3), oracle::Decimal(0.95)))
          << a << "," << b;
    }
  }
}

TEST(Formulas, SingularBranches) {
  EXPECT_EQ(burn_in_M({0.5, 0.5, false}, 1e-10), 1U);
  EXPECT_EQ(burn_in_M({0.3, 0.7, false}, 1e-10), 1U);
  EXPECT_THROW(burn_in_M({1.0, 1.0, false}, 1e-10), DegenerateError);
  EXPECT_THROW(burn_in_M({0.0, 0.0, true}, 1e-10), DegenerateError);
  EXPECT_THROW(sample_size_N({0.0, 0.4, true}, 0.01, 0.95), DegenerateError);
  EXPECT_THROW(sample_size_N({0.0, 0.4, false}, 0.01, 0.95), DegenerateError);
  EXPECT_THROW(sample_size_N({1.0, 1.0, false}, 0.01, 0.95), DegenerateError);
  EXPECT_THROW(sample_size_N({0.1, 0.1, false}, 0.0, 0.95), DomainError);
  EXPECT_THROW(burn_in_M({0.1, 0.1, false}, 1.5), DomainError);
}

TEST(Formulas, Monotonicity) {
  const TwoStateParams p{0.1, 0.1, false};
  std::size_t prev = 0;
  for (int e = 4; e <= 12; ++e) {
    const std::size_t m = burn_in_M(p, std::pow(10.0, -e));
    EXPECT_GE(m, prev);
    prev = m;
  }
  const double ratio = static_cast<double>(sample_size_N(p, 1e-2, 0.95)) /
                       static_cast<double>(sample_size_N(p, 1e-3, 0.95));
  EXPECT_GE(ratio, 0.00999);
  EXPECT_LE(ratio, 0.01001);
}

TEST(Sequential, EmptyProperty) {
  const EstimateResult r = run_sequential(random_pbn(5, 1, 2, 1, 2, 1), MetaProperty{}, {}, 1);
  EXPECT_EQ(r.estimate, 1.0);
  EXPECT_EQ(r.status, EstimateStatus::degenerate);
  EXPECT_EQ(r.diagnostic, "always in meta state 1");
}

TEST(Sequential, DeterministicAndReproducibleFromAbstraction) {
  const Simulator sim(random_pbn(8, 1, 3, 1, 3, 12, 0.02));
  const MetaProperty prop{"p", {{2, true}, {5, false}}};
  TwoStateSettings settings;
  settings.r = 2e-3;
  const EstimateResult a = run_sequential(sim, prop, settings, 99);
  const EstimateResult b = run_sequential(sim, prop, settings, 99);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.sample_size, b.sample_size);
  EXPECT_EQ(a.extensions, b.extensions);
  EXPECT_EQ(a.status, EstimateStatus::ok);
  EXPECT_LE(a.sample_size, a.steps_simulated);
  EXPECT_EQ(a.sample_size, a.required_burn_in + a.required_sample_size);

  ChainSet set = make_chain_set(sim, {prop}, 1, 99);
  extend_chains(sim, set, a.steps_simulated, 1);
  const BitVector& h = set.chains[0].history(0);
  const std::size_t n = a.required_sample_size;
  EXPECT_EQ(a.estimate, static_cast<double>(h.count(h.size() - n, h.size())) / static_cast<double>(n));
}

TEST(Sequential, NeverVisitedIsDegenerate) {
  const PbnModel m = model_of({{constant(false)}, {negation_of(1)}}, fixtures::kNoPerturbation);
  const EstimateResult r = run_sequential(m, fixtures::node_is(0, true), {}, 3, {200'000});
  EXPECT_EQ(r.status, EstimateStatus::degenerate);
  EXPECT_EQ(r.diagnostic, "never in meta state 1");
  EXPECT_EQ(r.estimate, 0.0);
  EXPECT_GT(r.extensions, 0U);
  EXPECT_LE(r.steps_simulated, 200'000U);
}

TEST(Sequential, AlternatingIsDegenerate) {
  const PbnModel m = model_of({{constant(false)}, {negation_of(1)}}, fixtures::kNoPerturbation);
  const EstimateResult r = run_sequential(m, fixtures::node_is(1, true), {}, 3, {100'000});
  EXPECT_EQ(r.status, EstimateStatus::degenerate);
  EXPECT_EQ(r.diagnostic, "meta states alternate deterministically");
  EXPECT_FALSE(std::isnan(r.estimate));
  EXPECT_NEAR(r.estimate, 0.5, 1e-3);
}

TEST(Sequential, CapExceeded) {
  const PbnModel m = random_pbn(8, 1, 3, 1, 3, 12, 0.02);
  TwoStateSettings settings;
  settings.r = 1e-5;
  const EstimateResult r = run_sequential(m, fixtures::node_is(0, true), settings, 1, {50'000});
  EXPECT_EQ(r.status, EstimateStatus::cap_exceeded);
  EXPECT_FALSE(std::isnan(r.estimate));
  TwoStateSettings bad;
  bad.n0 = 1;
  EXPECT_THROW(run_sequential(m, fixtures::node_is(0, true), bad, 1), DomainError);
}
