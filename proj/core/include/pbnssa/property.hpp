#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pbnssa/exact.hpp"
#include "pbnssa/model.hpp"

namespace pbnssa {

struct Constraint {
  std::uint32_t node = 0;
  bool value = false;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Splits the state space into meta state 1 (every constraint holds) and meta
/// state 0. No constraints means every state is in meta state 1.
struct MetaProperty {
  std::string name;
  std::vector<Constraint> constraints;

  friend bool operator==(const MetaProperty&, const MetaProperty&) = default;
};

/// Violations of node range / distinctness for a network with n nodes.
std::vector<std::string> validate(const MetaProperty& property, std::size_t n);

/// 1 iff every constraint holds in `state`.
bool abstract_state(const NetworkState& state, const MetaProperty& property) noexcept;

/// Exact probability of meta state 1 under a small network's distribution.
double meta_probability(const ExactDistribution& distribution, const MetaProperty& property);

/// Word-level matcher used on the simulation hot path.
class PropertyMatcher {
 public:
  explicit PropertyMatcher(const MetaProperty& property);

  bool operator()(const NetworkState& state) const noexcept {
    const auto words = state.bits().words();
    for (const Term& t : terms_) {
      if ((words[t.word] & t.mask) != t.expected) return false;
    }
    return true;
  }

 private:
  struct Term {
    std::size_t word;
    std::uint64_t mask;
    std::uint64_t expected;
  };
  std::vector<Term> terms_;
};

/// Property file: [{"name": "...", "constraints": [{"node": 0, "value": 1}]}].
std::vector<MetaProperty> parse_properties(std::string_view text);
std::string serialize_properties(const std::vector<MetaProperty>& properties);
std::vector<MetaProperty> load_properties(const std::filesystem::path& path);

}  // namespace pbnssa
