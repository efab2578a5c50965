#include "pbnssa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>

#include "pbnssa/errors.hpp"

namespace pbnssa {

MomentSummary summarize(std::span<const double> xs) {
  if (xs.size() < 2) throw DomainError("summarize: need at least two values");
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  for (const double x : xs) {
    const double n1 = n;
    n += 1.0;
    const double delta = x - mean;
    const double delta_n = delta / n;
    const double term = delta * delta_n * n1;
    mean += delta_n;
    m3 += term * delta_n * (n - 2.0) - 3.0 * delta_n * m2;
    m2 += term;
  }
  MomentSummary out;
  out.count = xs.size();
  out.mean = mean;
  out.variance = m2 / (n - 1.0);
  if (xs.size() >= 3 && m2 > 0.0) {
    out.skewness = (m3 / n) / std::pow(m2 / n, 1.5);
  }
  return out;
}

double lag1_autocorr(std::span<const double> xs) {
  if (xs.size() < 3) throw DomainError("lag1_autocorr: need at least three values");
  double mean = 0.0;
  for (const double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double denom = 0.0;
  double numer = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double d = xs[j] - mean;
    denom += d * d;
    if (j + 1 < xs.size()) numer += d * (xs[j + 1] - mean);
  }
  if (denom <= 0.0) throw DegenerateError("lag1_autocorr: zero variance");
  constexpr double kLimit = 0.999999;
  return std::clamp(numer / denom, -kLimit, kLimit);
}

double norm_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double inv_norm_cdf(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("inv_norm_cdf: q must lie in (0,1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double kLow = 0.02425;

  double x;
  if (q < kLow) {
    const double t = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  } else if (q <= 1.0 - kLow) {
    const double u = q - 0.5;
    const double r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double t = std::sqrt(-2.0 * std::log1p(-q));
    x = -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  }

  // Halley refinement; the residual Phi(x) - q is evaluated in the tail nearer
  // to q so that q <-> 1-q symmetry holds to rounding.
  const double e = q < 0.5 ? 0.5 * std::erfc(-x / std::numbers::sqrt2) - q
                           : (1.0 - q) - 0.5 * std::erfc(x / std::numbers::sqrt2);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double t_quantile(double q, double df) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("t_quantile: q must lie in (0,1)");
  if (!(df >= 1.0)) throw DomainError("t_quantile: df must be at least 1");
  if (q == 0.5) return 0.0;
  return boost::math::quantile(boost::math::students_t_distribution<double>(df), q);
}

VonNeumannResult von_neumann_statistic(std::span<const double> xs) {
  if (xs.size() < 8) throw DomainError("von_neumann_statistic: need at least eight values");
  double mean = 0.0;
  for (const double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double squares = 0.0;
  double successive = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double d = xs[j] - mean;
    squares += d * d;
    if (j + 1 < xs.size()) {
      const double s = xs[j + 1] - xs[j];
      successive += s * s;
    }
  }
  if (squares <= 0.0) throw DegenerateError("von_neumann_statistic: zero variance");
  const double count = static_cast<double>(xs.size());
  VonNeumannResult out;
  out.statistic = successive / (2.0 * squares);
  out.standardized = (1.0 - out.statistic) * std::sqrt((count * count - 1.0) / (count - 2.0));
  return out;
}

}  // namespace pbnssa
