#include "pbnssa/random_model.hpp"

#include <numeric>

#include "pbnssa/errors.hpp"
#include "pbnssa/rng.hpp"

namespace pbnssa {

PbnModel random_pbn(const RandomPbnSpec& spec) {
  if (spec.nodes == 0) throw DomainError("random_pbn: at least one node is required");
  if (spec.min_functions < 1 || spec.min_functions > spec.max_functions) {
    throw DomainError("random_pbn: need 1 <= min_functions <= max_functions");
  }
  if (spec.min_parents > spec.max_parents) throw DomainError("random_pbn: need min_parents <= max_parents");
  if (spec.max_parents > spec.nodes) {
    throw DomainError("random_pbn: max_parents (" + std::to_string(spec.max_parents) + ") exceeds the node count (" +
                      std::to_string(spec.nodes) + ")");
  }
  if (spec.max_parents > kMaxParents) {
    throw DomainError("random_pbn: max_parents exceeds the supported limit of " + std::to_string(kMaxParents));
  }
  if (!(spec.perturbation > 0.0 && spec.perturbation < 1.0)) {
    throw DomainError("random_pbn: perturbation must lie in (0,1)");
  }

  RandomStream rng(spec.seed, 0x9b17'0000'0000'0001ULL);
  PbnModel model;
  model.n = spec.nodes;
  model.perturbation = spec.perturbation;
  model.functions.resize(spec.nodes);

  std::vector<std::uint32_t> pool(spec.nodes);
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    const std::size_t count = rng.between(spec.min_functions, spec.max_functions);
    std::vector<double> weights(count);
    for (auto& w : weights) w = rng.uniform_open_low();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

    for (std::size_t j = 0; j < count; ++j) {
      PredictorFunction f;
      const std::size_t k = rng.between(spec.min_parents, spec.max_parents);
      // Partial Fisher-Yates over a fresh identity pool.
      std::iota(pool.begin(), pool.end(), 0U);
      f.parents.resize(k);
      for (std::size_t a = 0; a < k; ++a) {
        const std::size_t b = a + rng.below(spec.nodes - a);
        std::swap(pool[a], pool[b]);
        f.parents[a] = pool[a];
      }
      f.table = BitVector(std::size_t{1} << k);
      auto words = f.table.words();
      for (auto& w : words) w = rng.next_u64();
      f.table.resize(f.table.size());  // clears bits past the end
      f.probability = weights[j] / total;
      model.functions[i].push_back(std::move(f));
    }
  }
  return model;
}

}  // namespace pbnssa
