#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pbnssa/bit_vector.hpp"

namespace pbnssa {

/// Largest parent count accepted for a single predictor function; its truth
/// table then holds 2^24 bits (2 MiB).
inline constexpr std::size_t kMaxParents = 24;

/// Tolerance on the per-node selection-probability sum.
inline constexpr double kProbabilitySumTolerance = 1e-9;

/// Joint value of all nodes. Bit i holds node i. For small networks the state
/// is identified with the integer sum_i bit_i * 2^i.
class NetworkState {
 public:
  NetworkState() = default;
  explicit NetworkState(std::size_t n) : bits_(n) {}

  static NetworkState from_code(std::uint64_t code, std::size_t n);
  /// Integer code of the state; requires size() <= 64.
  std::uint64_t code() const;

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const noexcept { return bits_[i]; }
  void set(std::size_t i, bool value) noexcept { bits_.set(i, value); }
  void flip(std::size_t i) noexcept { bits_.set(i, !bits_[i]); }

  const BitVector& bits() const noexcept { return bits_; }
  BitVector& bits() noexcept { return bits_; }

  friend bool operator==(const NetworkState&, const NetworkState&) = default;

 private:
  BitVector bits_;
};

struct PredictorFunction {
  /// parents[0] is the most significant bit of the truth-table index.
  std::vector<std::uint32_t> parents;
  /// 2^|parents| entries.
  BitVector table;
  double probability = 1.0;

  std::size_t table_index(const NetworkState& state) const noexcept {
    std::size_t index = 0;
    for (const std::uint32_t parent : parents) index = (index << 1) | static_cast<std::size_t>(state[parent]);
    return index;
  }
  bool evaluate(const NetworkState& state) const noexcept { return table[table_index(state)]; }

  friend bool operator==(const PredictorFunction&, const PredictorFunction&) = default;
};

/// A probabilistic Boolean network with perturbations: node i picks one of
/// functions[i] per step with the functions' selection probabilities, unless
/// a random perturbation (each node flipped with probability `perturbation`)
/// happens first.
struct PbnModel {
  std::size_t n = 0;
  std::vector<std::vector<PredictorFunction>> functions;
  double perturbation = 0.0;
  /// Empty, or one label per node.
  std::vector<std::string> names;

  friend bool operator==(const PbnModel&, const PbnModel&) = default;
};

/// One predictor-function choice per node.
struct Realisation {
  std::vector<std::uint32_t> choice;
};

struct Violation {
  std::optional<std::size_t> node;
  std::string rule;
  std::string message;
};

/// Checks every structural invariant. An empty result means the model is valid.
std::vector<Violation> validate(const PbnModel& model);

/// Throws DomainError describing the first few violations, if any.
void require_valid(const PbnModel& model);

/// Sum of the parent counts of all predictor functions, divided by n.
double density(const PbnModel& model);

/// Number of realisations, saturating at UINT64_MAX.
std::uint64_t realisation_count(const PbnModel& model);

/// Synchronous update of every node by the chosen function.
NetworkState apply_realisation(const PbnModel& model, const Realisation& realisation, const NetworkState& state);

/// Probability of choosing `realisation`: product of the chosen selection probabilities.
double realisation_probability(const PbnModel& model, const Realisation& realisation);

}  // namespace pbnssa
