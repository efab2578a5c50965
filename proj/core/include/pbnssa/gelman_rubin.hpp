#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pbnssa/estimate.hpp"
#include "pbnssa/property.hpp"
#include "pbnssa/simulation.hpp"

namespace pbnssa {

struct PsrfReport {
  double between = 0.0;
  double within = 0.0;
  double sigma2_hat = 0.0;
  double r_hat = 0.0;
  std::size_t psi = 0;
  std::size_t omega = 0;
};

/// Per-chain window summary: mean and sample variance (divisor psi - 1).
struct WindowMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Potential scale reduction factor from omega windows of equal length psi:
///   B = psi/(omega-1) sum (mu_i - mu)^2,  W = mean of s_i^2,
///   sigma2 = (1 - 1/psi) W + B/psi,       R = sqrt(sigma2 / W).
/// Throws DomainError for omega < 2, psi < 2 or ragged windows, and
/// DegenerateError when W = 0.
PsrfReport psrf(const std::vector<std::vector<double>>& windows);
PsrfReport psrf(const std::vector<WindowMoments>& windows, std::size_t psi);

/// PSRF of property `property` over history elements [first, first + psi) of every chain.
PsrfReport psrf(const ChainSet& set, std::size_t property, std::size_t first, std::size_t psi);

struct ConvergenceSettings {
  std::size_t omega = 4;
  std::size_t psi0 = 1000;
  double threshold = 1.1;
};

void check(const ConvergenceSettings& settings);

struct ConvergedChains {
  ChainSet set;
  /// Burn-in: the window length that achieved convergence. Every chain holds 2 psi elements.
  std::size_t psi = 0;
  /// Largest defined R-hat per doubling round (infinity when some property had W = 0 but B > 0,
  /// NaN when no property had a defined R-hat).
  std::vector<double> rhat_trace;
};

/// Largest R-hat over the properties whose windows are not all constant and
/// equal; empty when there is no such property, infinity when every chain is
/// constant but the chains disagree.
std::optional<double> max_rhat(const ChainSet& set, std::size_t first, std::size_t psi);

/// Simulates omega chains to length 2 psi and doubles psi until the largest
/// R-hat over the registered properties is finite and below `threshold`.
/// Properties without constraints are always 1 and are not monitored. Throws
/// NonConvergenceError (carrying the R-hat trace) once omega * 2 psi would
/// exceed `limits.cap`.
ConvergedChains generate_converged_chains(const Simulator& simulator, std::vector<MetaProperty> properties,
                                          const ConvergenceSettings& settings, std::uint64_t seed,
                                          unsigned workers, const RunLimits& limits = {});

}  // namespace pbnssa
