#include "pbnssa/skart.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pbnssa/errors.hpp"
#include "pbnssa/stats.hpp"

namespace pbnssa {

void check(const SkartSettings& settings) {
  if (!(settings.h_star > 0.0)) throw DomainError("H* must be positive");
  if (!(settings.alpha > 0.0 && settings.alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  const SkartConstants& k = settings.constants;
  if (k.skewness_window == 0 || k.skewness_window > k.initial_length) {
    throw DomainError("skewness window must lie in [1, initial length]");
  }
  if (k.initial_length / (k.max_spacer + 1) < 8) throw DomainError("too few spaced batches for the randomness test");
  if (!(k.batch_growth > 1.0)) throw DomainError("batch growth factor must exceed 1");
}

std::vector<double> batch_means(const BitVector& bits, std::size_t first, std::size_t kappa, std::size_t count) {
  if (kappa == 0) throw DomainError("batch_means: batch size must be positive");
  if (first + kappa * count > bits.size()) throw DomainError("batch_means: insufficient data");
  std::vector<double> out(count);
  const double scale = 1.0 / static_cast<double>(kappa);
  for (std::size_t b = 0; b < count; ++b) {
    const std::size_t begin = first + b * kappa;
    out[b] = static_cast<double>(bits.count(begin, begin + kappa)) * scale;
  }
  return out;
}

std::vector<double> batch_means(const BitVector& bits, const BatchPlan& plan) {
  if (plan.spacer > plan.batches) throw DomainError("batch_means: spacer exceeds the batch count");
  if (bits.size() < plan.eta()) throw DomainError("batch_means: insufficient data");
  const std::size_t start = bits.size() - plan.eta() + plan.zeta();
  return batch_means(bits, start, plan.kappa, plan.batches - plan.spacer);
}

std::size_t initial_batch_size(std::optional<double> skewness, const SkartConstants& constants) {
  if (!skewness) return constants.large_batch;
  return std::abs(*skewness) <= constants.skewness_threshold ? 1 : constants.large_batch;
}

std::vector<double> spaced_means(std::span<const double> means, std::size_t spacer) {
  std::vector<double> out;
  for (std::size_t i = spacer; i < means.size(); i += spacer + 1) out.push_back(means[i]);
  return out;
}

bool randomness_test_passes(std::span<const double> means, double significance) {
  const VonNeumannResult vn = von_neumann_statistic(means);
  return vn.standardized <= inv_norm_cdf(1.0 - significance);
}

double skewness_adjusted_quantile(double t, double beta_hat) {
  if (beta_hat == 0.0) return t;
  return (std::cbrt(1.0 + 6.0 * beta_hat * (t - beta_hat)) - 1.0) / (2.0 * beta_hat);
}

SkartInterval adjusted_interval(double mean, double variance, std::size_t count, double autocorrelation,
                                double skewness, double alpha) {
  if (count < 3) throw DomainError("adjusted_interval: need at least three batches");
  if (!(variance > 0.0)) throw DegenerateError("adjusted_interval: zero batch-mean variance");
  SkartInterval out;
  out.mean = mean;
  out.variance = variance;
  out.autocorrelation = autocorrelation;
  const double k = static_cast<double>(count);
  out.beta_hat = skewness / (6.0 * std::sqrt(k));
  const double inflation = (1.0 + autocorrelation) / (1.0 - autocorrelation);
  const double scale = std::sqrt(inflation * variance / k);
  const double t_low = t_quantile(alpha / 2.0, k - 1.0);
  const double t_high = t_quantile(1.0 - alpha / 2.0, k - 1.0);
  // Positive skewness shifts the interval upward.
  out.low = mean - skewness_adjusted_quantile(t_high, out.beta_hat) * scale;
  out.high = mean - skewness_adjusted_quantile(t_low, out.beta_hat) * scale;
  out.half_width = std::max(mean - out.low, out.high - mean);
  return out;
}

SkartInterval adjusted_interval(std::span<const double> means, double alpha) {
  const MomentSummary summary = summarize(means);
  if (!(summary.variance > 0.0) || !summary.skewness) {
    throw DegenerateError("adjusted_interval: zero batch-mean variance");
  }
  return adjusted_interval(summary.mean, summary.variance, means.size(), lag1_autocorr(means), *summary.skewness,
                           alpha);
}

BatchGrowth grow_batches(std::size_t kappa, std::size_t batches, double h, double h_star, std::size_t ceiling,
                         std::size_t omega) {
  const double g = (h / h_star) * (h / h_star);
  std::size_t next_batches = batches;
  if (batches < ceiling) {
    const double wanted = std::ceil(g * static_cast<double>(batches));
    next_batches = std::max(batches, std::min(ceiling, static_cast<std::size_t>(wanted)));
  }
  next_batches = round_up_to_multiple(next_batches, omega);
  const double target = g * static_cast<double>(kappa) * static_cast<double>(batches);
  std::size_t next_kappa =
      std::max(kappa, static_cast<std::size_t>(std::ceil(target / static_cast<double>(next_batches))));
  if (next_kappa * next_batches <= kappa * batches) ++next_kappa;
  return {next_kappa, next_batches};
}

namespace {

std::string constant_diagnostic(double mean) {
  return mean >= 1.0 ? "always in meta state 1" : "never in meta state 1";
}

class ChainSamples {
 public:
  ChainSamples(const Simulator& simulator, ChainSet& set, std::size_t burn_in, unsigned workers,
               const RunLimits& limits)
      : simulator_(simulator), set_(set), burn_in_(burn_in), workers_(workers), limits_(limits) {}

  std::size_t omega() const noexcept { return set_.omega(); }

  /// Ensures every chain holds `per_chain` samples after the burn-in.
  bool ensure(std::size_t per_chain) {
    const std::size_t length = burn_in_ + per_chain;
    if (length <= set_.length()) return true;
    if (length * omega() > limits_.cap) return false;
    extend_chains_to(simulator_, set_, length, workers_);
    return true;
  }

  /// Chain-major batch means: `per_chain` batches of size kappa from every
  /// chain, starting `skip` samples after the burn-in.
  std::vector<double> means(std::size_t skip, std::size_t kappa, std::size_t per_chain) const {
    std::vector<double> out;
    out.reserve(per_chain * omega());
    for (const Chain& chain : set_.chains) {
      const auto part = batch_means(chain.history(0), burn_in_ + skip, kappa, per_chain);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }

  /// Values of samples [first, last) after the burn-in of every chain.
  std::vector<double> values(std::size_t first, std::size_t last) const {
    std::vector<double> out;
    for (const Chain& chain : set_.chains) {
      const BitVector& bits = chain.history(0);
      for (std::size_t i = burn_in_ + first; i < burn_in_ + last; ++i) out.push_back(bits[i] ? 1.0 : 0.0);
    }
    return out;
  }

  double mean(std::size_t first, std::size_t last) const {
    std::size_t ones = 0;
    for (const Chain& chain : set_.chains) ones += chain.history(0).count(burn_in_ + first, burn_in_ + last);
    return static_cast<double>(ones) / static_cast<double>((last - first) * omega());
  }

  std::size_t steps() const noexcept { return set_.total_steps(); }

 private:
  const Simulator& simulator_;
  ChainSet& set_;
  std::size_t burn_in_;
  unsigned workers_;
  const RunLimits& limits_;
};

bool all_equal(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); });
}

}  // namespace

EstimateResult skart_on_chains(const Simulator& simulator, ChainSet& set, std::size_t burn_in,
                               const SkartSettings& settings, SkartLayout layout, unsigned workers,
                               const RunLimits& limits) {
  check(settings);
  if (set.chains.empty() || set.properties.empty()) throw DomainError("skart: need at least one chain and property");
  const auto started = std::chrono::steady_clock::now();
  const SkartConstants& k = settings.constants;
  if (layout == SkartLayout::sequential && set.omega() != 1) {
    throw DomainError("skart: the sequential layout needs exactly one chain");
  }
  const bool multi = set.omega() > 1;

  ChainSamples samples(simulator, set, burn_in, workers, limits);
  const std::size_t omega = samples.omega();
  auto round = [&](std::size_t p) { return multi ? round_up_to_multiple(p, omega) : p; };

  EstimateResult result;
  result.burn_in = burn_in;
  bool constant_data = false;
  auto finish = [&](EstimateStatus status, std::string diagnostic) {
    result.status = status;
    result.diagnostic = std::move(diagnostic);
    result.steps_simulated = samples.steps();
    result.wall_time = std::chrono::steady_clock::now() - started;
    return result;
  };
  auto give_up = [&](std::size_t per_chain_available) {
    if (per_chain_available == 0) return finish(EstimateStatus::cap_exceeded, "no samples fit within the step cap");
    const double mean = samples.mean(0, per_chain_available);
    result.estimate = mean;
    if (constant_data) {
      result.ci_low = result.ci_high = mean;
      return finish(EstimateStatus::degenerate, constant_diagnostic(mean));
    }
    return finish(EstimateStatus::cap_exceeded, "required trajectory length exceeds the step cap");
  };

  if (set.properties.front().constraints.empty()) {
    result.estimate = 1.0;
    result.ci_low = result.ci_high = 1.0;
    return finish(EstimateStatus::degenerate, "always in meta state 1");
  }

  const std::size_t eta0 = round(k.initial_length);
  if (!samples.ensure(eta0 / omega)) return give_up(set.length() > burn_in ? set.length() - burn_in : 0);

  // Initial batch size from the skewness of the opening segment.
  std::optional<double> skewness;
  {
    const std::size_t first = multi ? 0 : k.initial_length - k.skewness_window;
    const auto xs = samples.values(first, eta0 / omega);
    skewness = summarize(xs).skewness;
  }
  std::size_t kappa = initial_batch_size(skewness, k);
  std::size_t p = round(eta0);
  std::size_t d = 0;

  // Randomness test with spacers; batch size grows once the spacer is exhausted.
  while (true) {
    const std::size_t per_chain = kappa * p / omega;
    if (!samples.ensure(per_chain)) return give_up(set.length() - burn_in);
    const auto means = samples.means(0, kappa, p / omega);
    const auto tested = spaced_means(means, d);
    if (all_equal(tested)) {
      constant_data = all_equal(means) && (means.front() == 0.0 || means.front() == 1.0);
      kappa *= 2;
      d = 0;
      ++result.extensions;
      continue;
    }
    constant_data = false;
    ++result.randomness_tests;
    if (randomness_test_passes(tested, k.randomness_significance)) break;
    if (d < k.max_spacer) {
      ++d;
    } else {
      kappa = static_cast<std::size_t>(std::ceil(k.batch_growth * static_cast<double>(kappa)));
      d = 0;
      ++result.extensions;
    }
  }

  // Sequential runs discard the spacer prefix once; multi-chain runs keep everything.
  const std::size_t skip = multi ? 0 : d * kappa;
  std::size_t retained = multi ? p : p - d;
  result.spacer = d;
  result.tested_batch_size = kappa;

  while (true) {
    const std::size_t per_chain = skip + kappa * retained / omega;
    if (!samples.ensure(per_chain)) return give_up(set.length() - burn_in);
    const auto means = samples.means(skip, kappa, retained / omega);
    if (all_equal(means)) {
      constant_data = means.front() == 0.0 || means.front() == 1.0;
      kappa *= 2;
      ++result.extensions;
      continue;
    }
    constant_data = false;
    const SkartInterval ci = adjusted_interval(means, settings.alpha);
    result.estimate = ci.mean;
    result.ci_low = ci.low;
    result.ci_high = ci.high;
    result.sample_size = kappa * retained;
    result.batch_size = kappa;
    result.batch_count = retained;
    if (ci.half_width <= settings.h_star) break;
    const BatchGrowth next = grow_batches(kappa, retained, ci.half_width, settings.h_star, k.batch_count_ceiling,
                                          multi ? omega : 1);
    kappa = next.kappa;
    retained = next.batches;
    ++result.extensions;
  }
  result.burn_in = burn_in + skip;
  return finish(EstimateStatus::ok, {});
}

EstimateResult skart_run(const Simulator& simulator, const MetaProperty& property, const SkartSettings& settings,
                         std::uint64_t seed, const RunLimits& limits) {
  ChainSet set = make_chain_set(simulator, {property}, 1, seed);
  return skart_on_chains(simulator, set, 0, settings, SkartLayout::sequential, 1, limits);
}

EstimateResult skart_run(const PbnModel& model, const MetaProperty& property, const SkartSettings& settings,
                         std::uint64_t seed, const RunLimits& limits) {
  return skart_run(Simulator(model), property, settings, seed, limits);
}

}  // namespace pbnssa
