#pragma once

#include <cstdint>
#include <vector>

#include "pbnssa/model.hpp"
#include "pbnssa/property.hpp"

namespace fixtures {

inline pbnssa::BitVector table_of(std::initializer_list<int> bits) {
  pbnssa::BitVector t;
  for (const int b : bits) t.push_back(b != 0);
  return t;
}

inline pbnssa::PredictorFunction constant(bool value, double prob = 1.0) {
  return {{}, table_of({value ? 1 : 0}), prob};
}

inline pbnssa::PredictorFunction copy_of(std::uint32_t parent, double prob = 1.0) {
  return {{parent}, table_of({0, 1}), prob};
}

inline pbnssa::PredictorFunction negation_of(std::uint32_t parent, double prob = 1.0) {
  return {{parent}, table_of({1, 0}), prob};
}

/// Smallest perturbation the model accepts that the Bernoulli sampler never fires.
inline constexpr double kNoPerturbation = 1e-12;

inline pbnssa::PbnModel model_of(std::vector<std::vector<pbnssa::PredictorFunction>> functions, double p) {
  pbnssa::PbnModel m;
  m.n = functions.size();
  m.functions = std::move(functions);
  m.perturbation = p;
  return m;
}

inline pbnssa::MetaProperty node_is(std::uint32_t node, bool value, std::string name = "p") {
  return {std::move(name), {{node, value}}};
}

}  // namespace fixtures
