#pragma once

#include <cstdint>

#include "pbnssa/model.hpp"

namespace pbnssa {

inline constexpr double kDefaultRandomPerturbation = 0.01;

struct RandomPbnSpec {
  std::size_t nodes = 0;
  std::size_t min_functions = 1;
  std::size_t max_functions = 1;
  std::size_t min_parents = 0;
  std::size_t max_parents = 0;
  double perturbation = kDefaultRandomPerturbation;
  std::uint64_t seed = 0;
};

/// Generates a random network. Per node the function count is uniform in
/// [min_functions, max_functions]; per function the parent count is uniform in
/// [min_parents, max_parents], parents are a uniform sample without
/// replacement and table bits are fair coin flips. Selection probabilities are
/// i.i.d. uniform(0,1] draws normalised to sum to one. The result depends only
/// on the argument.
///
/// Throws DomainError if the bounds are inconsistent, max_parents > nodes, or
/// max_parents > kMaxParents.
PbnModel random_pbn(const RandomPbnSpec& spec);

inline PbnModel random_pbn(std::size_t n, std::size_t f_min, std::size_t f_max, std::size_t par_min,
                           std::size_t par_max, std::uint64_t seed,
                           double perturbation = kDefaultRandomPerturbation) {
  return random_pbn(RandomPbnSpec{n, f_min, f_max, par_min, par_max, perturbation, seed});
}

}  // namespace pbnssa
