#pragma once

#include <cstddef>
#include <cstdint>

#include "pbnssa/bit_vector.hpp"
#include "pbnssa/estimate.hpp"
#include "pbnssa/model.hpp"
#include "pbnssa/property.hpp"
#include "pbnssa/simulation.hpp"

namespace pbnssa {

/// Transition counts of a 0-1 sequence; n01 counts 0 -> 1 steps and so on.
struct TransitionCounts {
  std::size_t n00 = 0;
  std::size_t n01 = 0;
  std::size_t n10 = 0;
  std::size_t n11 = 0;

  std::size_t from_zero() const noexcept { return n00 + n01; }
  std::size_t from_one() const noexcept { return n10 + n11; }

  TransitionCounts& operator+=(const TransitionCounts& o) noexcept {
    n00 += o.n00;
    n01 += o.n01;
    n10 += o.n10;
    n11 += o.n11;
    return *this;
  }
  friend bool operator==(const TransitionCounts&, const TransitionCounts&) = default;
};

/// Counts the pairs (x_j, x_{j+1}) for first <= j < last - 1. Word-parallel.
TransitionCounts count_transitions(const BitVector& bits, std::size_t first, std::size_t last);

/// Transition probabilities of the abstracted chain.
struct TwoStateParams {
  /// P(0 -> 1).
  double alpha = 0.0;
  /// P(1 -> 0).
  double beta = 0.0;
  /// A meta state was never a transition source, or alpha + beta = 0.
  bool degenerate = false;
};

/// Maximum-likelihood alpha, beta from transition counts.
TwoStateParams params_from_counts(const TransitionCounts& counts);

/// alpha = #(0->1)/#(0 as source), beta = #(1->0)/#(1 as source) over bits[first, last).
TwoStateParams estimate_alpha_beta(const BitVector& bits, std::size_t first, std::size_t last);
TwoStateParams estimate_alpha_beta(const BitVector& bits);

/// Burn-in ceil(log(eps (a+b) / max(a,b)) / log|1-a-b|); 1 when a+b = 1.
/// Throws DegenerateError for degenerate params or a + b = 2 (periodic), and
/// DomainError unless 0 < epsilon < 1.
std::size_t burn_in_M(const TwoStateParams& params, double epsilon);

/// Sample size ceil(a b (2-a-b) / (a+b)^3 * (Phi^{-1}((1+s)/2) / r)^2).
/// Throws DegenerateError when the params are degenerate, alpha or beta is 0,
/// or a + b = 2, and DomainError unless 0 < r < 1 and 0 < s < 1.
std::size_t sample_size_N(const TwoStateParams& params, double r, double s);

/// True when burn_in_M and sample_size_N are both defined for these params.
bool formulas_defined(const TwoStateParams& params) noexcept;

struct TwoStateSettings {
  std::size_t m0 = 100;
  std::size_t n0 = 10'000;
  double epsilon = 1e-10;
  double r = 1e-4;
  double s = 0.95;
};

/// Throws DomainError if the settings violate their invariants.
void check(const TwoStateSettings& settings);

/// Sequential two-state Markov chain estimate on one trajectory (chain id 0 of
/// `seed`). Extends the trajectory until M + N fits, then reports the mean of
/// the last N abstracted values. Degenerate abstractions double the trajectory
/// until `limits.cap`, then return status degenerate.
EstimateResult run_sequential(const Simulator& simulator, const MetaProperty& property,
                              const TwoStateSettings& settings, std::uint64_t seed, const RunLimits& limits = {});

EstimateResult run_sequential(const PbnModel& model, const MetaProperty& property, const TwoStateSettings& settings,
                              std::uint64_t seed, const RunLimits& limits = {});

}  // namespace pbnssa
