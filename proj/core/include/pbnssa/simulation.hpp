#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pbnssa/bit_vector.hpp"
#include "pbnssa/model.hpp"
#include "pbnssa/property.hpp"
#include "pbnssa/rng.hpp"

namespace pbnssa {

/// How the perturbation vector is drawn. Both give the same distribution but
/// consume the random stream differently, so results are only reproducible
/// within one mode.
enum class PerturbationMode {
  /// One Bernoulli(p) draw per node and step.
  bernoulli,
  /// Geometric gaps between flipped nodes; about 1 + n p draws per step.
  geometric,
};

enum class InitialStateMode {
  /// Independent uniform draw over {0,1}^n from the chain's own stream.
  uniform,
  all_zero,
};

struct SimulationOptions {
  PerturbationMode perturbation = PerturbationMode::bernoulli;
  InitialStateMode initial_state = InitialStateMode::uniform;
};

std::string_view to_string(PerturbationMode mode) noexcept;
std::string_view to_string(InitialStateMode mode) noexcept;
PerturbationMode parse_perturbation_mode(std::string_view text);
InitialStateMode parse_initial_state_mode(std::string_view text);

/// A model flattened for fast stepping. Immutable after construction and safe
/// to share between threads.
class Simulator {
 public:
  explicit Simulator(PbnModel model, SimulationOptions options = {});

  const PbnModel& model() const noexcept { return model_; }
  const SimulationOptions& options() const noexcept { return options_; }
  std::size_t node_count() const noexcept { return model_.n; }

  /// One transition from `in` into `out` (which must not alias `in`).
  /// Returns true if a perturbation replaced the function update.
  bool step(const NetworkState& in, NetworkState& out, RandomStream& rng) const;

  /// Draws the perturbation vector into `gamma` (resized to n); returns whether it is nonzero.
  bool sample_perturbation(BitVector& gamma, RandomStream& rng) const;

  /// Function-driven synchronous update: one predictor function drawn per node.
  void update(const NetworkState& in, NetworkState& out, RandomStream& rng) const;

  NetworkState initial_state(RandomStream& rng) const;

 private:
  struct Function {
    std::uint32_t parent_begin;
    std::uint32_t parent_count;
    std::size_t table_offset;
    /// Cumulative selection probability scaled to 2^32.
    std::uint64_t threshold;
  };
  struct Node {
    std::uint32_t first;
    std::uint32_t count;
  };

  bool evaluate(const Function& f, std::span<const std::uint64_t> state) const noexcept;

  PbnModel model_;
  SimulationOptions options_;
  std::vector<Node> nodes_;
  std::vector<Function> functions_;
  std::vector<std::uint32_t> parents_;
  std::vector<std::uint64_t> tables_;
  std::uint64_t flip_threshold_ = 0;
  double log_keep_ = 0.0;
};

/// Single transition (builds a Simulator per call; use Simulator for loops).
NetworkState step(const PbnModel& model, const NetworkState& state, RandomStream& rng);

/// One simulated trajectory. Only the current state and the abstracted bit of
/// every registered property are retained.
class Chain {
 public:
  Chain(const Simulator& simulator, std::uint64_t master_seed, std::uint64_t id, std::size_t property_count);

  std::uint64_t id() const noexcept { return rng_.stream_id(); }
  std::size_t length() const noexcept { return length_; }
  std::size_t perturbations() const noexcept { return perturbations_; }
  const NetworkState& current() const noexcept { return current_; }
  const BitVector& history(std::size_t property) const { return histories_.at(property); }

  void extend(const Simulator& simulator, std::span<const PropertyMatcher> matchers, std::size_t steps);

 private:
  RandomStream rng_;
  NetworkState current_;
  NetworkState next_;
  std::vector<BitVector> histories_;
  std::size_t length_ = 0;
  std::size_t perturbations_ = 0;
};

/// omega chains that are always extended together.
struct ChainSet {
  std::vector<MetaProperty> properties;
  std::vector<PropertyMatcher> matchers;
  std::vector<Chain> chains;
  /// Burn-in length; the first psi elements of each history are not samples.
  std::size_t psi = 0;

  std::size_t omega() const noexcept { return chains.size(); }
  std::size_t length() const noexcept { return chains.empty() ? 0 : chains.front().length(); }
  std::size_t total_steps() const noexcept { return length() * omega(); }
};

/// Chains with ids first_id .. first_id + omega - 1 drawn from `master_seed`.
ChainSet make_chain_set(const Simulator& simulator, std::vector<MetaProperty> properties, std::size_t omega,
                        std::uint64_t master_seed, std::uint64_t first_id = 0);

/// Advances every chain by `by` steps using up to `workers` threads. Results
/// depend only on the seeds and chain ids, never on `workers`.
void extend_chains(const Simulator& simulator, ChainSet& set, std::size_t by, unsigned workers);

/// Extends every chain to `length` steps (no-op for chains already that long).
void extend_chains_to(const Simulator& simulator, ChainSet& set, std::size_t length, unsigned workers);

}  // namespace pbnssa
