#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace pbnssa {

struct MomentSummary {
  std::size_t count = 0;
  double mean = 0.0;
  /// Sample variance (divisor count - 1).
  double variance = 0.0;
  /// Biased moment ratio m3 / m2^{3/2}; empty when the variance is zero or count < 3.
  std::optional<double> skewness;
};

/// One-pass (Welford / Terriberry) moments. Throws DomainError for fewer than two values.
MomentSummary summarize(std::span<const double> xs);

/// Lag-1 autocorrelation sum (x_j - m)(x_{j+1} - m) / sum (x_j - m)^2, clamped
/// to (-0.999999, 0.999999). Throws DomainError for count < 3 and
/// DegenerateError for zero variance.
double lag1_autocorr(std::span<const double> xs);

/// Standard normal quantile. Acklam's rational approximation followed by one
/// Halley step against erfc; absolute error well below 1e-12 on (0,1).
double inv_norm_cdf(double q);

/// Standard normal CDF.
double norm_cdf(double x);

/// Student-t quantile with `df` degrees of freedom.
double t_quantile(double q, double df);

struct VonNeumannResult {
  /// Mean square successive difference over twice the sum of squared deviations.
  double statistic = 0.0;
  /// (1 - statistic) sqrt((count^2 - 1)/(count - 2)); approximately N(0,1)
  /// for i.i.d. normal data and large for positively correlated data.
  double standardized = 0.0;
};

/// Von Neumann ratio test for randomness. Throws DomainError for fewer than 8
/// values and DegenerateError for zero variance.
VonNeumannResult von_neumann_statistic(std::span<const double> xs);

}  // namespace pbnssa
