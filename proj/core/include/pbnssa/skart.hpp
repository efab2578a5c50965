#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pbnssa/bit_vector.hpp"
#include "pbnssa/estimate.hpp"
#include "pbnssa/model.hpp"
#include "pbnssa/property.hpp"
#include "pbnssa/simulation.hpp"

namespace pbnssa {

/// p batches of size kappa; the first `spacer` batches are dropped.
struct BatchPlan {
  std::size_t kappa = 1;
  std::size_t batches = 2;
  std::size_t spacer = 0;

  std::size_t eta() const noexcept { return kappa * batches; }
  std::size_t zeta() const noexcept { return spacer * kappa; }
};

/// Tuning constants of the batch-means procedure.
struct SkartConstants {
  std::size_t initial_length = 1280;
  /// Skewness is measured on the last `skewness_window` initial samples.
  std::size_t skewness_window = 1024;
  double skewness_threshold = 4.0;
  std::size_t large_batch = 16;
  double randomness_significance = 0.20;
  double batch_growth = 1.4142135623730951;
  std::size_t max_spacer = 10;
  std::size_t batch_count_ceiling = 1024;
};

struct SkartSettings {
  /// Required half-width H*.
  double h_star = 1e-4;
  /// The interval has nominal coverage 1 - alpha.
  double alpha = 0.05;
  SkartConstants constants;
};

void check(const SkartSettings& settings);

/// Means of consecutive kappa-blocks of the last plan.eta() elements, skipping
/// the first plan.zeta() of them; batches - spacer values. Throws DomainError if
/// bits holds fewer than eta elements.
std::vector<double> batch_means(const BitVector& bits, const BatchPlan& plan);

/// `count` means of kappa-blocks starting at bits[first].
std::vector<double> batch_means(const BitVector& bits, std::size_t first, std::size_t kappa, std::size_t count);

/// 1 if |skewness| <= threshold, else the large batch size; an undefined
/// skewness (zero variance) also gives the large batch size.
std::size_t initial_batch_size(std::optional<double> skewness, const SkartConstants& constants = {});

/// Every (spacer+1)-th mean, starting after the first `spacer` means.
std::vector<double> spaced_means(std::span<const double> means, std::size_t spacer);

/// One-sided von Neumann test against positive correlation. Throws
/// DegenerateError for constant input.
bool randomness_test_passes(std::span<const double> means, double significance);

/// Skewness correction of a t quantile, G(t) = (cbrt(1 + 6 b (t - b)) - 1) / (2 b); G(t) = t for b = 0.
double skewness_adjusted_quantile(double t, double beta_hat);

struct SkartInterval {
  double mean = 0.0;
  double variance = 0.0;
  double autocorrelation = 0.0;
  double beta_hat = 0.0;
  double low = 0.0;
  double high = 0.0;
  /// max(mean - low, high - mean)
  double half_width = 0.0;
};

/// Skewness- and autoregression-adjusted interval from batch means.
/// Throws DegenerateError for zero variance.
SkartInterval adjusted_interval(std::span<const double> means, double alpha);

/// The same interval from its ingredients: variance inflated by
/// A = (1 + phi)/(1 - phi), t quantiles with count - 1 degrees of freedom
/// corrected by G with beta_hat = skewness / (6 sqrt(count)).
SkartInterval adjusted_interval(double mean, double variance, std::size_t count, double autocorrelation,
                                double skewness, double alpha);

struct BatchGrowth {
  std::size_t kappa;
  std::size_t batches;
};

/// Scales the retained sample by (H/H*)^2: the batch count grows first, up to
/// `ceiling`, then the batch size. The result is rounded up to a multiple of
/// `omega` batches.
BatchGrowth grow_batches(std::size_t kappa, std::size_t batches, double h, double h_star, std::size_t ceiling,
                         std::size_t omega = 1);

/// Smallest multiple of omega that is >= p.
constexpr std::size_t round_up_to_multiple(std::size_t p, std::size_t omega) noexcept {
  return (p + omega - 1) / omega * omega;
}

/// Sequential batch-means estimate on one trajectory (chain id 0 of `seed`).
EstimateResult skart_run(const Simulator& simulator, const MetaProperty& property, const SkartSettings& settings,
                         std::uint64_t seed, const RunLimits& limits = {});

EstimateResult skart_run(const PbnModel& model, const MetaProperty& property, const SkartSettings& settings,
                         std::uint64_t seed, const RunLimits& limits = {});

enum class SkartLayout {
  /// One chain; initial skewness on the last window; the spacer prefix is discarded.
  sequential,
  /// Several converged chains; batch counts are multiples of omega, every chain
  /// holds the same number of batches, nothing beyond the burn-in is discarded.
  /// With a single chain this is the sequential layout.
  multi_chain,
};

/// The batch-means state machine over the chains of `set` (property 0), using
/// the elements after the first `burn_in` of each chain.
EstimateResult skart_on_chains(const Simulator& simulator, ChainSet& set, std::size_t burn_in,
                               const SkartSettings& settings, SkartLayout layout, unsigned workers,
                               const RunLimits& limits);

}  // namespace pbnssa
