#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "pbnssa/model.hpp"

namespace pbnssa {

/// Largest network accepted by the exact solver.
inline constexpr std::size_t kExactMaxNodes = 20;

struct ExactDistribution {
  /// Indexed by NetworkState::code().
  std::vector<double> probabilities;
  std::size_t iterations = 0;

  double sum_if(const std::function<bool(std::uint64_t)>& predicate) const;
};

struct ExactOptions {
  /// Stop once the L-infinity change of one iteration falls below this.
  double tolerance = 1e-12;
  std::size_t max_iterations = 10'000'000;
  /// Empty for the uniform start, otherwise a full initial distribution.
  std::vector<double> start;
};

/// Steady-state distribution by power iteration pi <- pi P from the uniform
/// distribution. P is never materialised densely: the function-driven part is
/// stored sparsely per source state and the perturbation part is applied as a
/// per-bit XOR convolution. Throws DomainError for n > kExactMaxNodes or when
/// the sparse structure would exceed its entry budget, and NonConvergenceError
/// if max_iterations is reached.
ExactDistribution exact_steady_state(const PbnModel& model, const ExactOptions& options = {});

/// Row `from` of the full 2^n x 2^n transition matrix.
std::vector<double> transition_row(const PbnModel& model, std::uint64_t from);

/// One multiplication pi P, computed the same way exact_steady_state does.
std::vector<double> apply_transition(const PbnModel& model, const std::vector<double>& pi);

}  // namespace pbnssa
