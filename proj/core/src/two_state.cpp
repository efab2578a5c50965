#include "pbnssa/two_state.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>

#include "pbnssa/errors.hpp"
#include "pbnssa/stats.hpp"

namespace pbnssa {

TransitionCounts count_transitions(const BitVector& bits, std::size_t first, std::size_t last) {
  TransitionCounts out;
  last = std::min(last, bits.size());
  if (last < first + 2) return out;
  const auto words = bits.words();
  const std::size_t end = last - 1;  // source positions are [first, end)
  const std::size_t w_first = first / 64;
  const std::size_t w_last = (end - 1) / 64;
  for (std::size_t w = w_first; w <= w_last; ++w) {
    const std::uint64_t cur = words[w];
    const std::uint64_t nxt = (cur >> 1) | (w + 1 < words.size() ? words[w + 1] << 63 : 0);
    std::uint64_t mask = ~std::uint64_t{0};
    if (w == w_first) mask &= ~std::uint64_t{0} << (first % 64);
    if (w == w_last) mask &= ~std::uint64_t{0} >> (63 - (end - 1) % 64);
    const auto sources = static_cast<std::size_t>(std::popcount(mask));
    const auto ones = static_cast<std::size_t>(std::popcount(cur & mask));
    const auto n10 = static_cast<std::size_t>(std::popcount(cur & ~nxt & mask));
    const auto n01 = static_cast<std::size_t>(std::popcount(~cur & nxt & mask));
    out.n10 += n10;
    out.n11 += ones - n10;
    out.n01 += n01;
    out.n00 += sources - ones - n01;
  }
  return out;
}

TwoStateParams params_from_counts(const TransitionCounts& counts) {
  TwoStateParams p;
  const std::size_t z = counts.from_zero();
  const std::size_t o = counts.from_one();
  p.alpha = z == 0 ? 0.0 : static_cast<double>(counts.n01) / static_cast<double>(z);
  p.beta = o == 0 ? 0.0 : static_cast<double>(counts.n10) / static_cast<double>(o);
  p.degenerate = z == 0 || o == 0 || p.alpha + p.beta == 0.0;
  return p;
}

TwoStateParams estimate_alpha_beta(const BitVector& bits, std::size_t first, std::size_t last) {
  if (last > bits.size() || last < first + 2) throw DomainError("estimate_alpha_beta: need at least two elements");
  return params_from_counts(count_transitions(bits, first, last));
}

TwoStateParams estimate_alpha_beta(const BitVector& bits) {
  return estimate_alpha_beta(bits, 0, bits.size());
}

bool formulas_defined(const TwoStateParams& params) noexcept {
  return !params.degenerate && params.alpha > 0.0 && params.beta > 0.0 && params.alpha + params.beta < 2.0;
}

std::size_t burn_in_M(const TwoStateParams& params, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("burn_in_M: epsilon must lie in (0,1)");
  if (params.degenerate) throw DegenerateError("burn_in_M: degenerate two-state parameters");
  const double sum = params.alpha + params.beta;
  if (sum >= 2.0) throw DegenerateError("burn_in_M: alpha + beta = 2, the abstraction is periodic");
  const double lambda = std::abs(1.0 - sum);
  if (lambda == 0.0) return 1;
  const double m = std::log(epsilon * sum / std::max(params.alpha, params.beta)) / std::log(lambda);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(m)));
}

std::size_t sample_size_N(const TwoStateParams& params, double r, double s) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("sample_size_N: r must lie in (0,1)");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("sample_size_N: s must lie in (0,1)");
  if (!formulas_defined(params)) {
    throw DegenerateError("sample_size_N: undefined for alpha = " + std::to_string(params.alpha) +
                          ", beta = " + std::to_string(params.beta));
  }
  const double a = params.alpha;
  const double b = params.beta;
  const double z = inv_norm_cdf(0.5 * (1.0 + s));
  const double n = a * b * (2.0 - a - b) / std::pow(a + b, 3) * (z * z) / (r * r);
  return static_cast<std::size_t>(std::ceil(n));
}

void check(const TwoStateSettings& settings) {
  if (!(settings.epsilon > 0.0 && settings.epsilon < 1.0)) throw DomainError("epsilon must lie in (0,1)");
  if (!(settings.r > 0.0 && settings.r < 1.0)) throw DomainError("precision r must lie in (0,1)");
  if (!(settings.s > 0.0 && settings.s < 1.0)) throw DomainError("confidence s must lie in (0,1)");
  if (settings.n0 < 2) throw DomainError("n0 must be at least 2");
}

namespace {

std::string describe_degenerate(const BitVector& bits, std::size_t first, std::size_t last) {
  const std::size_t ones = bits.count(first, last);
  if (ones == last - first) return "always in meta state 1";
  if (ones == 0) return "never in meta state 1";
  const TransitionCounts c = count_transitions(bits, first, last);
  if (c.n01 == 0) return "no transition from meta state 0 to meta state 1 observed";
  if (c.n10 == 0) return "no transition from meta state 1 to meta state 0 observed";
  return "meta states alternate deterministically";
}

}  // namespace

EstimateResult run_sequential(const Simulator& simulator, const MetaProperty& property,
                              const TwoStateSettings& settings, std::uint64_t seed, const RunLimits& limits) {
  check(settings);
  const auto started = std::chrono::steady_clock::now();
  EstimateResult result;
  auto finish = [&](double estimate) {
    result.estimate = estimate;
    result.wall_time = std::chrono::steady_clock::now() - started;
    return result;
  };

  if (property.constraints.empty()) {
    result.status = EstimateStatus::degenerate;
    result.diagnostic = "always in meta state 1";
    return finish(1.0);
  }

  ChainSet set = make_chain_set(simulator, {property}, 1, seed);
  const Chain& chain = set.chains.front();
  std::size_t M = settings.m0;
  std::size_t N = settings.n0;
  std::size_t l = M + N;
  if (l > limits.cap) {
    result.status = EstimateStatus::cap_exceeded;
    result.diagnostic = "initial trajectory m0 + n0 exceeds the step cap";
    return finish(0.0);
  }
  extend_chains_to(simulator, set, l, 1);

  auto window_mean = [&](std::size_t n) {
    return static_cast<double>(chain.history(0).count(l - n, l)) / static_cast<double>(n);
  };

  while (true) {
    const BitVector& bits = chain.history(0);
    const TwoStateParams params = estimate_alpha_beta(bits, l - N, l);
    if (!formulas_defined(params)) {
      if (2 * l > limits.cap) {
        result.status = EstimateStatus::degenerate;
        result.diagnostic = describe_degenerate(bits, l - N, l);
        result.sample_size = l;
        result.burn_in = M;
        result.steps_simulated = l;
        return finish(window_mean(N));
      }
      N = 2 * l - M;
      l = 2 * l;
      extend_chains_to(simulator, set, l, 1);
      ++result.extensions;
      continue;
    }
    M = burn_in_M(params, settings.epsilon);
    N = sample_size_N(params, settings.r, settings.s);
    result.required_burn_in = M;
    result.required_sample_size = N;
    if (M + N <= l) break;
    if (M + N > limits.cap) {
      result.status = EstimateStatus::cap_exceeded;
      result.diagnostic = "required trajectory length " + std::to_string(M + N) + " exceeds the step cap";
      result.sample_size = l;
      result.steps_simulated = l;
      return finish(window_mean(std::min(N, l)));
    }
    l = M + N;
    extend_chains_to(simulator, set, l, 1);
    ++result.extensions;
  }

  result.sample_size = M + N;
  result.burn_in = M;
  result.steps_simulated = l;
  return finish(window_mean(N));
}

EstimateResult run_sequential(const PbnModel& model, const MetaProperty& property, const TwoStateSettings& settings,
                              std::uint64_t seed, const RunLimits& limits) {
  return run_sequential(Simulator(model), property, settings, seed, limits);
}

}  // namespace pbnssa
