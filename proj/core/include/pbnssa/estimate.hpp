#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace pbnssa {

enum class EstimateStatus {
  ok,
  /// The abstraction never left one meta state (or never made a transition
  /// that the formulas need) before the step cap; `estimate` is the observed
  /// frequency and `diagnostic` says which state.
  degenerate,
  /// The required trajectory length exceeded the step cap.
  cap_exceeded,
};

std::string_view to_string(EstimateStatus status) noexcept;

/// Outcome of one steady-state estimate for one property.
struct EstimateResult {
  double estimate = 0.0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  /// Elements the estimate is computed from.
  std::size_t sample_size = 0;
  /// Elements discarded as burn-in (per chain for the multi-chain methods).
  std::size_t burn_in = 0;
  /// Total simulated steps over all chains.
  std::size_t steps_simulated = 0;
  std::size_t extensions = 0;
  std::chrono::duration<double> wall_time{0};
  EstimateStatus status = EstimateStatus::ok;
  std::string diagnostic;

  // Two-state only: the last burn-in / sample size requirement.
  std::size_t required_burn_in = 0;
  std::size_t required_sample_size = 0;

  // Skart only: final batch layout.
  std::size_t batch_size = 0;
  std::size_t batch_count = 0;
  std::size_t spacer = 0;
  /// Randomness tests performed and the batch size of the one that passed.
  std::size_t randomness_tests = 0;
  std::size_t tested_batch_size = 0;
};

/// Settings shared by every estimator.
struct RunLimits {
  /// Upper bound on simulated steps summed over all chains.
  std::size_t cap = 1'000'000'000;
};

}  // namespace pbnssa
