#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pbnssa/estimate.hpp"
#include "pbnssa/gelman_rubin.hpp"
#include "pbnssa/property.hpp"
#include "pbnssa/simulation.hpp"
#include "pbnssa/skart.hpp"
#include "pbnssa/two_state.hpp"

namespace pbnssa {

struct ParallelSettings {
  std::size_t omega = 4;
  std::size_t psi0 = 1000;
  double rhat_threshold = 1.1;
  /// Threads used to extend chains; results never depend on it.
  unsigned workers = 1;
};

void check(const ParallelSettings& settings);

struct MultiPropertyResult {
  /// One result per registered property, in registration order.
  std::vector<EstimateResult> properties;
  /// Size of the pooled post-burn-in sample shared by all properties (omega * n).
  std::size_t total_sample_size = 0;
  /// Per-chain samples after the burn-in.
  std::size_t per_chain = 0;
  std::size_t extensions = 0;
  /// Final burn-in per chain, after the burn-in re-check.
  std::size_t psi = 0;
  std::size_t omega = 0;
  std::size_t steps_simulated = 0;
  std::vector<double> rhat_trace;
  std::chrono::duration<double> wall_time{0};
};

/// Transition counts of property `property` pooled over [first, first + n) of
/// every chain; pairs that would straddle two chains are not counted.
TransitionCounts merged_transitions(const ChainSet& set, std::size_t property, std::size_t first, std::size_t n);

/// Two-state estimation on omega converged chains. The post-burn-in segments
/// of all chains form one pooled sample that every property reuses; chains are
/// extended until each property's N fits in the pool, and the burn-in grows to
/// the largest M if that exceeds psi. Properties without constraints and
/// properties whose abstraction stays degenerate up to the cap are reported
/// individually. Throws NonConvergenceError if the chains do not converge.
MultiPropertyResult parallel_two_state(const Simulator& simulator, const std::vector<MetaProperty>& properties,
                                       const TwoStateSettings& settings, const ParallelSettings& parallel,
                                       std::uint64_t seed, const RunLimits& limits = {});

struct ParallelSkartResult {
  EstimateResult estimate;
  std::size_t psi = 0;
  std::size_t omega = 0;
  std::vector<double> rhat_trace;
};

/// Batch-means estimation on omega converged chains: the first psi samples of
/// each chain are skipped and batch counts are multiples of omega so that no
/// batch straddles two chains. Throws NonConvergenceError if the chains do not
/// converge.
ParallelSkartResult parallel_skart(const Simulator& simulator, const MetaProperty& property,
                                   const SkartSettings& settings, const ParallelSettings& parallel,
                                   std::uint64_t seed, const RunLimits& limits = {});

struct Speedup {
  double speedup = 0.0;
  /// Speed-up rescaled by size_par / size_seq.
  double speedup_e = 0.0;
};

/// Throws DomainError unless every argument is positive and finite.
Speedup speedup_metrics(double t_seq, double t_par, double size_seq, double size_par);

}  // namespace pbnssa
