#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "models.hpp"
#include "oracles.hpp"
#include "pbnssa/errors.hpp"
#include "pbnssa/gelman_rubin.hpp"
#include "pbnssa/parallel.hpp"
#include "pbnssa/random_model.hpp"
#include "pbnssa/simulation.hpp"
#include "pbnssa/skart.hpp"
#include "pbnssa/two_state.hpp"

using namespace pbnssa;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool finite_result(const EstimateResult& r) {
  if (!std::isfinite(r.estimate)) return false;
  if (r.ci_low && !std::isfinite(*r.ci_low)) return false;
  if (r.ci_high && !std::isfinite(*r.ci_high)) return false;
  return true;
}

struct Case {
  PbnModel model;
  MetaProperty property;
  double exact = 0.0;
};

/// 20 random networks with n cycling through 6, 8 and 10, each with one or
/// two node constraints and its probability from the dense linear oracle.
std::vector<Case> coverage_cases() {
  std::vector<Case> cases;
  const std::size_t sizes[] = {6, 8, 10};
  for (std::uint32_t k = 0; k < 20; ++k) {
    const std::size_t n = sizes[k % 3];
    Case c;
    c.model = random_pbn(n, 1, 3, 1, 3, 1000 + k, 0.02);
    const auto first = static_cast<std::uint32_t>(k % n);
    c.property.name = "case" + std::to_string(k);
    c.property.constraints.push_back({first, k % 2 == 0});
    if (k % 4 == 1) c.property.constraints.push_back({static_cast<std::uint32_t>((first + 3) % n), true});
    c.exact = oracle::probability(oracle::stationary(oracle::transition_matrix(c.model)), c.property);
    cases.push_back(std::move(c));
  }
  return cases;
}

struct Coverage {
  std::size_t runs = 0;
  std::size_t covered = 0;
  std::size_t not_ok = 0;
  double worst = 0.0;
  double seconds = 0.0;
};

void report(const char* label, const Coverage& c) {
  std::printf("  %-14s covered %zu/%zu  (status not ok: %zu, worst |error| %.3g, %.1f s)\n", label, c.covered, c.runs,
              c.not_ok, c.worst, c.seconds);
}

using Estimator = std::function<EstimateResult(const Simulator&, const MetaProperty&, std::uint64_t)>;
using Judge = std::function<bool(const EstimateResult&, double exact)>;

Coverage coverage(const std::vector<Case>& cases, const Estimator& estimate, const Judge& covers) {
  Coverage c;
  const auto start = Clock::now();
  for (const Case& k : cases) {
    const Simulator sim(k.model);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const EstimateResult r = estimate(sim, k.property, seed * 7919 + k.model.n);
      ++c.runs;
      if (r.status != EstimateStatus::ok) {
        ++c.not_ok;
        continue;
      }
      c.worst = std::max(c.worst, std::abs(r.estimate - k.exact));
      if (covers(r, k.exact)) ++c.covered;
    }
  }
  c.seconds = seconds_since(start);
  return c;
}

constexpr double kPrecision = 1e-3;

TwoStateSettings two_state_settings() {
  TwoStateSettings s;
  s.r = kPrecision;
  s.s = 0.95;
  s.epsilon = 1e-10;
  return s;
}

SkartSettings skart_settings() {
  SkartSettings s;
  s.h_star = kPrecision;
  s.alpha = 0.05;
  return s;
}

bool within_precision(const EstimateResult& r, double exact) { return std::abs(r.estimate - exact) <= kPrecision; }

bool interval_covers(const EstimateResult& r, double exact) {
  return r.ci_low && r.ci_high && *r.ci_low <= exact && exact <= *r.ci_high;
}

bool criterion_1() {
  const TwoStateParams p{0.1, 0.1, false};
  const oracle::Decimal tenth("0.1");
  const std::uint64_t n_oracle = oracle::sample_size(tenth, tenth, oracle::Decimal("0.01"), oracle::Decimal("0.95"));
  const std::uint64_t m_oracle = oracle::burn_in(tenth, tenth, oracle::Decimal("1e-10"));
  const std::size_t n = sample_size_N(p, 0.01, 0.95);
  const std::size_t m = burn_in_M(p, 1e-10);
  std::printf("  N = %zu (oracle %llu)  M = %zu (oracle %llu)\n", n, static_cast<unsigned long long>(n_oracle), m,
              static_cast<unsigned long long>(m_oracle));
  return n == n_oracle && m == m_oracle && n == 86433 && m == 101;
}

bool criterion_2() {
  const std::vector<std::vector<double>> windows{{0, 1, 0, 1}, {1, 0, 1, 0}};
  // Longhand moments of the two windows.
  long double grand = 0;
  std::vector<long double> means;
  for (const auto& w : windows) {
    long double s = 0;
    for (const double x : w) s += x;
    means.push_back(s / w.size());
    grand += s / w.size();
  }
  grand /= windows.size();
  const long double psi = 4;
  const long double omega = 2;
  long double b = 0;
  for (const long double m : means) b += (m - grand) * (m - grand);
  b *= psi / (omega - 1);
  long double w_sum = 0;
  for (std::size_t j = 0; j < windows.size(); ++j) {
    long double ss = 0;
    for (const double x : windows[j]) ss += (x - means[j]) * (x - means[j]);
    w_sum += ss / (psi - 1);
  }
  const long double w = w_sum / omega;
  const long double sigma2 = (psi - 1) / psi * w + b / psi;
  const long double rhat = std::sqrt(sigma2 / w);

  const PsrfReport r = psrf(windows);
  std::printf("  B = %.15g  W = %.15g  sigma2 = %.15g  R = %.15g\n", r.between, r.within, r.sigma2_hat, r.r_hat);
  const double tol = 1e-12;
  bool ok = std::abs(r.between - 0.0) <= tol && std::abs(r.within - 1.0 / 3.0) <= tol &&
            std::abs(r.sigma2_hat - 0.25) <= tol && std::abs(r.r_hat - std::sqrt(0.75)) <= tol;
  ok = ok && std::abs(r.between - static_cast<double>(b)) <= tol && std::abs(r.within - static_cast<double>(w)) <= tol &&
       std::abs(r.sigma2_hat - static_cast<double>(sigma2)) <= tol &&
       std::abs(r.r_hat - static_cast<double>(rhat)) <= tol;
  return ok;
}

constexpr std::size_t kRequiredCoverage = 93;

bool criterion_3() {
  const auto cases = coverage_cases();
  const TwoStateSettings ts = two_state_settings();
  const SkartSettings ss = skart_settings();
  const Coverage two = coverage(
      cases, [&](const Simulator& sim, const MetaProperty& p, std::uint64_t seed) { return run_sequential(sim, p, ts, seed); },
      within_precision);
  report("two-state", two);
  const Coverage sk = coverage(
      cases, [&](const Simulator& sim, const MetaProperty& p, std::uint64_t seed) { return skart_run(sim, p, ss, seed); },
      interval_covers);
  report("skart", sk);
  return two.covered >= kRequiredCoverage && sk.covered >= kRequiredCoverage;
}

bool criterion_4() {
  const auto cases = coverage_cases();
  const TwoStateSettings ts = two_state_settings();
  const SkartSettings ss = skart_settings();
  ParallelSettings ps;
  ps.omega = 4;
  ps.workers = 4;
  const Coverage two = coverage(
      cases,
      [&](const Simulator& sim, const MetaProperty& p, std::uint64_t seed) {
        return parallel_two_state(sim, {p}, ts, ps, seed).properties.front();
      },
      within_precision);
  report("par-two-state", two);
  const Coverage sk = coverage(
      cases,
      [&](const Simulator& sim, const MetaProperty& p, std::uint64_t seed) {
        return parallel_skart(sim, p, ss, ps, seed).estimate;
      },
      interval_covers);
  report("par-skart", sk);
  return two.covered >= kRequiredCoverage && sk.covered >= kRequiredCoverage;
}

bool criterion_5() {
  const TwoStateSettings ts = two_state_settings();
  ParallelSettings ps;
  ps.omega = 4;
  ps.workers = std::max(1U, std::thread::hardware_concurrency());
  std::size_t within = 0;
  double worst = 0.0;
  const auto start = Clock::now();
  for (std::uint32_t k = 0; k < 50; ++k) {
    const std::size_t n = 20 + (k * 7) % 31;
    const Simulator sim(random_pbn(n, 1, 3, 1, 3, 5000 + k, 0.02));
    const MetaProperty prop{"pair" + std::to_string(k), {{static_cast<std::uint32_t>(k % n), k % 2 == 0}}};
    const EstimateResult seq = run_sequential(sim, prop, ts, 2 * k + 1);
    const EstimateResult par = parallel_two_state(sim, {prop}, ts, ps, 2 * k + 2).properties.front();
    const double diff = std::abs(seq.estimate - par.estimate);
    worst = std::max(worst, diff);
    if (seq.status == EstimateStatus::ok && par.status == EstimateStatus::ok && diff < 2 * kPrecision) ++within;
  }
  std::printf("  %zu/50 pairs differ by less than %.0e (worst %.3g, %.1f s)\n", within, 2 * kPrecision, worst,
              seconds_since(start));
  return within * 100 >= 95 * 50;
}

bool criterion_6() {
  const Simulator sim(random_pbn(50, 1, 3, 1, 3, 4242, 0.02));
  std::vector<MetaProperty> props;
  for (std::uint32_t k = 0; k < 7; ++k) {
    MetaProperty p{"prop" + std::to_string(k), {{k * 7, k % 2 == 0}}};
    if (k >= 4) p.constraints.push_back({k * 7 + 1, true});
    props.push_back(std::move(p));
  }
  const TwoStateSettings ts = two_state_settings();
  ParallelSettings ps;
  ps.omega = 4;
  ps.workers = std::max(1U, std::thread::hardware_concurrency());
  const auto start = Clock::now();
  const MultiPropertyResult combined = parallel_two_state(sim, props, ts, ps, 17);
  std::size_t individual = 0;
  bool all_ok = true;
  for (const auto& r : combined.properties) all_ok = all_ok && r.status == EstimateStatus::ok;
  for (const auto& p : props) {
    const MultiPropertyResult single = parallel_two_state(sim, {p}, ts, ps, 17);
    individual += single.total_sample_size;
    all_ok = all_ok && single.properties.front().status == EstimateStatus::ok;
  }
  std::printf("  combined pooled %zu, sum of individual %zu, ratio %.3f (%.1f s)\n", combined.total_sample_size,
              individual, static_cast<double>(individual) / static_cast<double>(combined.total_sample_size),
              seconds_since(start));
  return all_ok && combined.total_sample_size < individual;
}

double throughput(const Simulator& sim, unsigned workers) {
  const MetaProperty prop{"p", {{0, true}}};
  constexpr std::size_t kChains = 8;
  constexpr std::size_t kSteps = 4000;
  double best = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    ChainSet set = make_chain_set(sim, {prop}, kChains, 31);
    const auto start = Clock::now();
    extend_chains(sim, set, kSteps, workers);
    best = std::max(best, static_cast<double>(kChains * kSteps) / seconds_since(start));
  }
  return best;
}

bool criterion_7() {
  const PbnModel model = random_pbn(500, 15, 25, 8, 12, 77);
  std::printf("  density %.1f\n", density(model));
  const Simulator sim(model);
  const unsigned cores = std::max(1U, std::thread::hardware_concurrency());
  const unsigned max_w = std::min(8U, cores);
  const double base = throughput(sim, 1);
  std::printf("  hardware threads %u, checking w = 1..%u\n", cores, max_w);
  bool ok = true;
  for (unsigned w = 1; w <= max_w; ++w) {
    const double t = w == 1 ? base : throughput(sim, w);
    const double ratio = t / base;
    std::printf("  w=%u  %.0f states/s  ratio %.2f (need %.2f)\n", w, t, ratio, 0.5 * w);
    ok = ok && ratio >= 0.5 * w;
  }
  return ok;
}

bool same(const EstimateResult& a, const EstimateResult& b) {
  auto opt_same = [](const std::optional<double>& x, const std::optional<double>& y) {
    return x.has_value() == y.has_value() && (!x || *x == *y);
  };
  return a.estimate == b.estimate && opt_same(a.ci_low, b.ci_low) && opt_same(a.ci_high, b.ci_high) &&
         a.sample_size == b.sample_size && a.burn_in == b.burn_in && a.steps_simulated == b.steps_simulated &&
         a.status == b.status;
}

bool criterion_8() {
  const unsigned worker_counts[] = {1, 2, 3, 4, 8};
  bool ok = true;
  const auto start = Clock::now();
  for (std::uint32_t k = 0; k < 10; ++k) {
    const std::size_t n = 10 + 5 * k;
    const Simulator sim(random_pbn(n, 1, 3, 1, 4, 900 + k, 0.02));
    const std::vector<MetaProperty> props{{"a", {{0, true}}}, {"b", {{1, false}, {2, true}}}};
    ParallelSettings ps;
    ps.omega = 2 + k % 4;
    ps.psi0 = 200;
    const std::uint64_t seed = 100 + k;
    std::vector<std::vector<EstimateResult>> runs;
    for (const unsigned w : worker_counts) {
      ps.workers = w;
      if (k % 2 == 0) {
        TwoStateSettings ts;
        ts.r = 2e-3;
        runs.push_back(parallel_two_state(sim, props, ts, ps, seed).properties);
      } else {
        SkartSettings ss;
        ss.h_star = 2e-3;
        runs.push_back({parallel_skart(sim, props[0], ss, ps, seed).estimate});
      }
    }
    bool identical = true;
    for (const auto& run : runs) {
      for (std::size_t i = 0; i < run.size(); ++i) identical = identical && same(run[i], runs.front()[i]);
    }
    std::printf("  config %u: %s omega=%zu n=%zu  %s\n", k, k % 2 == 0 ? "par-two-state" : "par-skart", ps.omega, n,
                identical ? "identical" : "DIFFERENT");
    ok = ok && identical;
  }
  std::printf("  %.1f s\n", seconds_since(start));
  return ok;
}

struct DegenerateCheck {
  std::string name;
  std::function<bool()> run;
};

bool criterion_9() {
  using fixtures::constant;
  using fixtures::kNoPerturbation;
  using fixtures::model_of;
  using fixtures::negation_of;
  using fixtures::node_is;
  const PbnModel frozen = model_of({{constant(false)}, {constant(true)}}, kNoPerturbation);
  const PbnModel alternating = model_of({{constant(false)}, {negation_of(1)}}, kNoPerturbation);
  const PbnModel moving = random_pbn(6, 1, 2, 1, 2, 3, 0.02);
  const PbnModel mixed = model_of({{constant(true, 0.5), constant(false, 0.5)}, {constant(false)}}, kNoPerturbation);
  const MetaProperty empty{"all", {}};
  const RunLimits small{400'000};
  ParallelSettings ps;
  ps.omega = 4;
  ps.psi0 = 100;
  const TwoStateSettings ts;
  const SkartSettings ss;
  TwoStateSettings coarse;
  coarse.r = 5e-3;

  auto degenerate = [](const EstimateResult& r, double expected) {
    return r.status == EstimateStatus::degenerate && finite_result(r) && r.estimate == expected &&
           !r.diagnostic.empty();
  };
  auto non_convergence = [](auto&& f) {
    try {
      f();
    } catch (const NonConvergenceError& e) {
      return !e.trace().empty();
    }
    return false;
  };
  auto throws_degenerate = [](auto&& f) {
    try {
      f();
    } catch (const DegenerateError&) {
      return true;
    }
    return false;
  };

  const std::vector<DegenerateCheck> checks{
      {"alpha+beta=0 burn-in", [&] { return throws_degenerate([] { burn_in_M({0.0, 0.0, true}, 1e-10); }); }},
      {"alpha+beta=0 sample size",
       [&] { return throws_degenerate([] { sample_size_N({0.0, 0.0, true}, 1e-3, 0.95); }); }},
      {"alpha+beta=2 burn-in", [&] { return throws_degenerate([] { burn_in_M({1.0, 1.0, false}, 1e-10); }); }},
      {"alpha+beta=1 formulas",
       [&] {
         const TwoStateParams p = params_from_counts({1, 1, 1, 1});
         const std::size_t m = burn_in_M(p, 1e-10);
         const std::size_t n = sample_size_N(p, 1e-3, 0.95);
         return p.alpha + p.beta == 1.0 && m >= 1 && n > 0;
       }},
      {"alpha+beta=2 chain",
       [&] {
         const auto r = run_sequential(alternating, node_is(1, true), ts, 3, small);
         return r.status == EstimateStatus::degenerate && finite_result(r);
       }},
      {"never visited, two-state",
       [&] { return degenerate(run_sequential(frozen, node_is(0, true), ts, 3, small), 0.0); }},
      {"constant chain, two-state",
       [&] { return degenerate(run_sequential(frozen, node_is(1, true), ts, 3, small), 1.0); }},
      {"never visited, skart", [&] { return degenerate(skart_run(frozen, node_is(0, true), ss, 3, small), 0.0); }},
      {"constant chain, skart", [&] { return degenerate(skart_run(frozen, node_is(1, true), ss, 3, small), 1.0); }},
      {"all chains constant, par-two-state",
       [&] {
         return non_convergence([&] {
           parallel_two_state(Simulator(frozen), {node_is(0, true), node_is(1, true)}, ts, ps, 3, small);
         });
       }},
      {"all chains constant, par-skart",
       [&] { return non_convergence([&] { parallel_skart(Simulator(frozen), node_is(0, true), ss, ps, 3, small); }); }},
      {"never visited, par-two-state",
       [&] {
         const auto r = parallel_two_state(Simulator(mixed), {node_is(0, true), node_is(1, true)}, coarse, ps, 3,
                                           {2'000'000});
         return r.properties[0].status == EstimateStatus::ok && finite_result(r.properties[0]) &&
                degenerate(r.properties[1], 0.0);
       }},
      {"empty property, all methods",
       [&] {
         const Simulator sim(moving);
         return degenerate(run_sequential(sim, empty, ts, 1), 1.0) && degenerate(skart_run(sim, empty, ss, 1), 1.0) &&
                degenerate(parallel_two_state(sim, {empty}, ts, ps, 1).properties[0], 1.0) &&
                degenerate(parallel_skart(sim, empty, ss, ps, 1).estimate, 1.0);
       }},
      {"cap reached, two-state",
       [&] {
         TwoStateSettings tight;
         tight.r = 1e-5;
         const auto r = run_sequential(moving, node_is(0, true), tight, 1, {50'000});
         return r.status == EstimateStatus::cap_exceeded && finite_result(r);
       }},
      {"cap reached, skart",
       [&] {
         SkartSettings tight;
         tight.h_star = 1e-5;
         const auto r = skart_run(moving, node_is(0, true), tight, 1, {50'000});
         return r.status == EstimateStatus::cap_exceeded && finite_result(r);
       }},
      {"non-convergence",
       [&] {
         const PbnModel stuck = model_of({{constant(false)}, {fixtures::copy_of(1)}}, kNoPerturbation);
         return non_convergence(
             [&] { parallel_two_state(Simulator(stuck), {node_is(1, true)}, ts, {8, 16, 1.1, 1}, 1, {20'000}); });
       }},
  };
  bool ok = true;
  for (const auto& c : checks) {
    bool passed = false;
    try {
      passed = c.run();
    } catch (const std::exception& e) {
      std::printf("  %s: unexpected exception: %s\n", c.name.c_str(), e.what());
    }
    std::printf("  %-32s %s\n", c.name.c_str(), passed ? "ok" : "failed");
    ok = ok && passed;
  }
  return ok;
}

const std::function<bool()> kCriteria[] = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                           criterion_6, criterion_7, criterion_8, criterion_9};

bool run(int criterion) {
  bool ok = false;
  try {
    ok = kCriteria[criterion - 1]();
  } catch (const std::exception& e) {
    std::printf("  unexpected exception: %s\n", e.what());
  }
  std::printf("criterion %d: %s\n", criterion, ok ? "PASS" : "FAIL");
  std::fflush(stdout);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int c = std::atoi(argv[i]);
    if (c < 1 || c > 9) {
      std::fprintf(stderr, "usage: %s [criterion 1-9 ...]\n", argv[0]);
      return 2;
    }
    selected.push_back(c);
  }
  if (selected.empty()) {
    for (int c = 1; c <= 9; ++c) selected.push_back(c);
  }
  bool all = true;
  for (const int c : selected) all = run(c) && all;
  return all ? 0 : 1;
}
