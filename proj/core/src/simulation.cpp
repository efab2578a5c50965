#include "pbnssa/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "pbnssa/errors.hpp"

namespace pbnssa {
namespace {

std::uint64_t scale_to_u32_range(double p) {
  const double scaled = std::round(p * 4294967296.0);
  if (scaled <= 0.0) return 0;
  if (scaled >= 4294967296.0) return std::uint64_t{1} << 32;
  return static_cast<std::uint64_t>(scaled);
}

}  // namespace

std::string_view to_string(PerturbationMode mode) noexcept {
  return mode == PerturbationMode::bernoulli ? "bernoulli" : "geometric";
}

std::string_view to_string(InitialStateMode mode) noexcept {
  return mode == InitialStateMode::uniform ? "uniform" : "all-zero";
}

PerturbationMode parse_perturbation_mode(std::string_view text) {
  if (text == "bernoulli") return PerturbationMode::bernoulli;
  if (text == "geometric") return PerturbationMode::geometric;
  throw DomainError("unknown perturbation mode '" + std::string(text) + "'");
}

InitialStateMode parse_initial_state_mode(std::string_view text) {
  if (text == "uniform") return InitialStateMode::uniform;
  if (text == "all-zero") return InitialStateMode::all_zero;
  throw DomainError("unknown initial-state mode '" + std::string(text) + "'");
}

Simulator::Simulator(PbnModel model, SimulationOptions options) : model_(std::move(model)), options_(options) {
  require_valid(model_);
  nodes_.reserve(model_.n);
  for (const auto& set : model_.functions) {
    nodes_.push_back({static_cast<std::uint32_t>(functions_.size()), static_cast<std::uint32_t>(set.size())});
    double cumulative = 0.0;
    double total = 0.0;
    for (const auto& f : set) total += f.probability;
    for (std::size_t j = 0; j < set.size(); ++j) {
      const auto& f = set[j];
      cumulative += f.probability / total;
      Function compiled{static_cast<std::uint32_t>(parents_.size()), static_cast<std::uint32_t>(f.parents.size()),
                        tables_.size(),
                        j + 1 == set.size() ? (std::uint64_t{1} << 32) : scale_to_u32_range(cumulative)};
      parents_.insert(parents_.end(), f.parents.begin(), f.parents.end());
      const auto words = f.table.words();
      tables_.insert(tables_.end(), words.begin(), words.end());
      functions_.push_back(compiled);
    }
  }
  flip_threshold_ = scale_to_u32_range(model_.perturbation);
  log_keep_ = std::log1p(-model_.perturbation);
}

bool Simulator::evaluate(const Function& f, std::span<const std::uint64_t> state) const noexcept {
  std::size_t index = 0;
  const std::uint32_t* parent = parents_.data() + f.parent_begin;
  for (std::uint32_t k = 0; k < f.parent_count; ++k) {
    const std::uint32_t p = parent[k];
    index = (index << 1) | ((state[p >> 6] >> (p & 63U)) & 1U);
  }
  return (tables_[f.table_offset + (index >> 6)] >> (index & 63U)) & 1U;
}

bool Simulator::sample_perturbation(BitVector& gamma, RandomStream& rng) const {
  const std::size_t n = model_.n;
  if (gamma.size() != n) gamma.resize(n);
  std::fill(gamma.words().begin(), gamma.words().end(), 0);
  bool any = false;
  if (options_.perturbation == PerturbationMode::bernoulli) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.next_u32() < flip_threshold_) {
        gamma.set(i, true);
        any = true;
      }
    }
    return any;
  }
  double position = -1.0;
  while (true) {
    position += 1.0 + std::floor(std::log(rng.uniform_open_low()) / log_keep_);
    if (position >= static_cast<double>(n)) break;
    gamma.set(static_cast<std::size_t>(position), true);
    any = true;
  }
  return any;
}

void Simulator::update(const NetworkState& in, NetworkState& out, RandomStream& rng) const {
  const auto state = in.bits().words();
  auto target = out.bits().words();
  std::fill(target.begin(), target.end(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    const Function* f = functions_.data() + node.first;
    if (node.count > 1) {
      const std::uint64_t u = rng.next_u32();
      while (u >= f->threshold) ++f;
    }
    if (evaluate(*f, state)) target[i >> 6] |= std::uint64_t{1} << (i & 63U);
  }
}

bool Simulator::step(const NetworkState& in, NetworkState& out, RandomStream& rng) const {
  if (out.size() != model_.n) out = NetworkState(model_.n);
  const std::size_t n = model_.n;
  auto target = out.bits().words();
  const auto source = in.bits().words();
  std::fill(target.begin(), target.end(), 0);
  bool perturbed = false;
  if (options_.perturbation == PerturbationMode::bernoulli) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.next_u32() < flip_threshold_) {
        target[i >> 6] |= std::uint64_t{1} << (i & 63U);
        perturbed = true;
      }
    }
  } else {
    double position = -1.0;
    while (true) {
      position += 1.0 + std::floor(std::log(rng.uniform_open_low()) / log_keep_);
      if (position >= static_cast<double>(n)) break;
      const auto i = static_cast<std::size_t>(position);
      target[i >> 6] |= std::uint64_t{1} << (i & 63U);
      perturbed = true;
    }
  }
  if (perturbed) {
    for (std::size_t w = 0; w < target.size(); ++w) target[w] ^= source[w];
    return true;
  }
  update(in, out, rng);
  return false;
}

NetworkState Simulator::initial_state(RandomStream& rng) const {
  NetworkState state(model_.n);
  if (options_.initial_state == InitialStateMode::uniform) {
    for (std::size_t i = 0; i < model_.n; ++i) state.set(i, rng.next_u32() & 1U);
  }
  return state;
}

NetworkState step(const PbnModel& model, const NetworkState& state, RandomStream& rng) {
  const Simulator simulator(model);
  NetworkState next(model.n);
  simulator.step(state, next, rng);
  return next;
}

Chain::Chain(const Simulator& simulator, std::uint64_t master_seed, std::uint64_t id, std::size_t property_count)
    : rng_(master_seed, id), next_(simulator.node_count()), histories_(property_count) {
  current_ = simulator.initial_state(rng_);
}

void Chain::extend(const Simulator& simulator, std::span<const PropertyMatcher> matchers, std::size_t steps) {
  if (matchers.size() != histories_.size()) throw DomainError("chain: property count mismatch");
  for (auto& h : histories_) h.reserve(length_ + steps);
  for (std::size_t t = 0; t < steps; ++t) {
    if (simulator.step(current_, next_, rng_)) ++perturbations_;
    std::swap(current_, next_);
    for (std::size_t k = 0; k < matchers.size(); ++k) histories_[k].push_back(matchers[k](current_));
  }
  length_ += steps;
}

ChainSet make_chain_set(const Simulator& simulator, std::vector<MetaProperty> properties, std::size_t omega,
                        std::uint64_t master_seed, std::uint64_t first_id) {
  ChainSet set;
  for (const auto& p : properties) {
    const auto problems = validate(p, simulator.node_count());
    if (!problems.empty()) throw DomainError(problems.front());
    set.matchers.emplace_back(p);
  }
  set.properties = std::move(properties);
  set.chains.reserve(omega);
  for (std::size_t c = 0; c < omega; ++c) {
    set.chains.emplace_back(simulator, master_seed, first_id + c, set.properties.size());
  }
  return set;
}

void extend_chains(const Simulator& simulator, ChainSet& set, std::size_t by, unsigned workers) {
  if (by == 0 || set.chains.empty()) return;
  const std::size_t omega = set.chains.size();
  const std::size_t threads = std::min<std::size_t>(std::max(1U, workers), omega);
  const std::span<const PropertyMatcher> matchers(set.matchers);
  if (threads == 1) {
    for (auto& chain : set.chains) chain.extend(simulator, matchers, by);
    return;
  }
  // Static round-robin ownership: chain c belongs to worker c % threads.
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < omega; c += threads) set.chains[c].extend(simulator, matchers, by);
    });
  }
}

void extend_chains_to(const Simulator& simulator, ChainSet& set, std::size_t length, unsigned workers) {
  const std::size_t current = set.length();
  if (length > current) extend_chains(simulator, set, length - current, workers);
}

}  // namespace pbnssa
