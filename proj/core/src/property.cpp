#include "pbnssa/property.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "pbnssa/errors.hpp"

namespace pbnssa {

std::vector<std::string> validate(const MetaProperty& property, std::size_t n) {
  std::vector<std::string> out;
  std::unordered_set<std::uint32_t> seen;
  for (const auto& c : property.constraints) {
    if (c.node >= n) {
      out.push_back("property '" + property.name + "': node " + std::to_string(c.node) + " is out of range");
    } else if (!seen.insert(c.node).second) {
      out.push_back("property '" + property.name + "': node " + std::to_string(c.node) + " is constrained twice");
    }
  }
  return out;
}

bool abstract_state(const NetworkState& state, const MetaProperty& property) noexcept {
  for (const auto& c : property.constraints) {
    if (state[c.node] != c.value) return false;
  }
  return true;
}

double meta_probability(const ExactDistribution& distribution, const MetaProperty& property) {
  std::uint64_t mask = 0;
  std::uint64_t expected = 0;
  for (const auto& c : property.constraints) {
    mask |= std::uint64_t{1} << c.node;
    if (c.value) expected |= std::uint64_t{1} << c.node;
  }
  return distribution.sum_if([&](std::uint64_t s) { return (s & mask) == expected; });
}

PropertyMatcher::PropertyMatcher(const MetaProperty& property) {
  std::map<std::size_t, Term> by_word;
  for (const auto& c : property.constraints) {
    const std::size_t word = c.node / BitVector::kWordBits;
    const std::uint64_t bit = std::uint64_t{1} << (c.node % BitVector::kWordBits);
    Term& t = by_word.try_emplace(word, Term{word, 0, 0}).first->second;
    t.mask |= bit;
    if (c.value) t.expected |= bit;
  }
  for (const auto& [word, term] : by_word) terms_.push_back(term);
}

std::vector<MetaProperty> parse_properties(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!doc.is_array()) throw ParseError("", "property file must be a JSON array");
  std::vector<MetaProperty> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "[" + std::to_string(i) + "]";
    const json& entry = doc[i];
    try {
      MetaProperty property;
      property.name = entry.at("name").get<std::string>();
      for (const json& c : entry.at("constraints")) {
        const int value = c.at("value").get<int>();
        if (value != 0 && value != 1) throw ParseError(where, "constraint value must be 0 or 1");
        property.constraints.push_back({c.at("node").get<std::uint32_t>(), value == 1});
      }
      out.push_back(std::move(property));
    } catch (const json::exception& e) {
      throw ParseError(where, e.what());
    }
  }
  return out;
}

std::string serialize_properties(const std::vector<MetaProperty>& properties) {
  using nlohmann::json;
  json doc = json::array();
  for (const auto& p : properties) {
    json constraints = json::array();
    for (const auto& c : p.constraints) constraints.push_back({{"node", c.node}, {"value", c.value ? 1 : 0}});
    doc.push_back({{"name", p.name}, {"constraints", std::move(constraints)}});
  }
  return doc.dump(2) + "\n";
}

std::vector<MetaProperty> load_properties(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open property file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_properties(buffer.str());
}

}  // namespace pbnssa
