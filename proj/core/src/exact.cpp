#include "pbnssa/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "pbnssa/errors.hpp"

namespace pbnssa {
namespace {

constexpr std::size_t kMaxSparseEntries = std::size_t{1} << 27;

/// Function-driven transition structure in CSR form: for each source state the
/// distribution of f(s) over realisations. Nodes choose independently, so f(s)
/// is a product of per-node Bernoulli(q_i(s)) variables, q_i(s) being the total
/// probability of the node's functions that output 1 on s.
struct FunctionPart {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> targets;
  std::vector<double> probs;
};

void append_row(const PbnModel& model, std::uint64_t from, std::vector<std::uint32_t>& targets,
                std::vector<double>& probs) {
  const NetworkState state = NetworkState::from_code(from, model.n);
  std::uint64_t certain = 0;
  std::vector<std::size_t> uncertain;
  std::vector<double> q;
  for (std::size_t i = 0; i < model.n; ++i) {
    double on = 0.0;
    double total = 0.0;
    for (const auto& f : model.functions[i]) {
      total += f.probability;
      if (f.evaluate(state)) on += f.probability;
    }
    if (on <= 0.0) continue;
    if (on >= total) {
      certain |= std::uint64_t{1} << i;
      continue;
    }
    uncertain.push_back(i);
    q.push_back(on / total);
  }
  const std::size_t combos = std::size_t{1} << uncertain.size();
  for (std::size_t mask = 0; mask < combos; ++mask) {
    std::uint64_t target = certain;
    double p = 1.0;
    for (std::size_t k = 0; k < uncertain.size(); ++k) {
      if ((mask >> k) & 1U) {
        target |= std::uint64_t{1} << uncertain[k];
        p *= q[k];
      } else {
        p *= 1.0 - q[k];
      }
    }
    targets.push_back(static_cast<std::uint32_t>(target));
    probs.push_back(p);
  }
}

FunctionPart build_function_part(const PbnModel& model) {
  const std::size_t states = std::size_t{1} << model.n;
  FunctionPart part;
  part.offsets.reserve(states + 1);
  part.offsets.push_back(0);
  for (std::uint64_t s = 0; s < states; ++s) {
    append_row(model, s, part.targets, part.probs);
    if (part.targets.size() > kMaxSparseEntries) {
      throw DomainError("exact solver: transition structure exceeds " + std::to_string(kMaxSparseEntries) +
                        " entries");
    }
    part.offsets.push_back(part.targets.size());
  }
  return part;
}

/// v <- K v where K(s, s') = prod_i p^[s_i != s'_i] (1-p)^[s_i == s'_i], including
/// the identity (gamma = 0) term.
void xor_convolve(std::vector<double>& v, std::size_t n, double p) {
  const std::size_t states = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t s = 0; s < states; ++s) {
      if (s & bit) continue;
      const double a = v[s];
      const double b = v[s | bit];
      v[s] = (1.0 - p) * a + p * b;
      v[s | bit] = (1.0 - p) * b + p * a;
    }
  }
}

void check_size(const PbnModel& model) {
  require_valid(model);
  if (model.n > kExactMaxNodes) {
    throw DomainError("exact solver: n = " + std::to_string(model.n) + " gives 2^" + std::to_string(model.n) +
                      " states; the limit is n <= " + std::to_string(kExactMaxNodes));
  }
}

std::vector<double> step_distribution(const PbnModel& model, const FunctionPart& part, const std::vector<double>& pi) {
  const double p = model.perturbation;
  const double stay = std::pow(1.0 - p, static_cast<double>(model.n));
  std::vector<double> next(pi.size(), 0.0);
  for (std::size_t s = 0; s < pi.size(); ++s) {
    const double mass = pi[s];
    if (mass == 0.0) continue;
    for (std::size_t e = part.offsets[s]; e < part.offsets[s + 1]; ++e) next[part.targets[e]] += mass * part.probs[e];
  }
  std::vector<double> perturbed = pi;
  xor_convolve(perturbed, model.n, p);
  for (std::size_t s = 0; s < pi.size(); ++s) next[s] = stay * next[s] + (perturbed[s] - stay * pi[s]);
  return next;
}

}  // namespace

double ExactDistribution::sum_if(const std::function<bool(std::uint64_t)>& predicate) const {
  double total = 0.0;
  for (std::uint64_t s = 0; s < probabilities.size(); ++s) {
    if (predicate(s)) total += probabilities[s];
  }
  return total;
}

ExactDistribution exact_steady_state(const PbnModel& model, const ExactOptions& options) {
  check_size(model);
  const std::size_t states = std::size_t{1} << model.n;
  const FunctionPart part = build_function_part(model);

  std::vector<double> pi;
  if (options.start.empty()) {
    pi.assign(states, 1.0 / static_cast<double>(states));
  } else {
    if (options.start.size() != states) throw DomainError("exact solver: start distribution has the wrong length");
    pi = options.start;
  }

  ExactDistribution out;
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    std::vector<double> next = step_distribution(model, part, pi);
    double change = 0.0;
    for (std::size_t s = 0; s < states; ++s) change = std::max(change, std::abs(next[s] - pi[s]));
    pi = std::move(next);
    if (change < options.tolerance) {
      out.iterations = it;
      out.probabilities = std::move(pi);
      return out;
    }
  }
  throw NonConvergenceError("exact solver: no convergence within " + std::to_string(options.max_iterations) +
                            " iterations");
}

std::vector<double> transition_row(const PbnModel& model, std::uint64_t from) {
  check_size(model);
  const std::size_t states = std::size_t{1} << model.n;
  if (from >= states) throw DomainError("transition_row: state code out of range");
  std::vector<std::uint32_t> targets;
  std::vector<double> probs;
  append_row(model, from, targets, probs);

  const double p = model.perturbation;
  const double stay = std::pow(1.0 - p, static_cast<double>(model.n));
  std::vector<double> row(states, 0.0);
  for (std::size_t e = 0; e < targets.size(); ++e) row[targets[e]] += stay * probs[e];
  for (std::uint64_t to = 0; to < states; ++to) {
    if (to == from) continue;
    const int h = std::popcount(to ^ from);
    row[to] += std::pow(p, h) * std::pow(1.0 - p, static_cast<double>(model.n) - h);
  }
  return row;
}

std::vector<double> apply_transition(const PbnModel& model, const std::vector<double>& pi) {
  check_size(model);
  if (pi.size() != (std::size_t{1} << model.n)) throw DomainError("apply_transition: wrong vector length");
  return step_distribution(model, build_function_part(model), pi);
}

}  // namespace pbnssa
