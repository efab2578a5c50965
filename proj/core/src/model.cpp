#include "pbnssa/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "pbnssa/errors.hpp"

namespace pbnssa {

NetworkState NetworkState::from_code(std::uint64_t code, std::size_t n) {
  if (n > 64) throw DomainError("state codes are limited to 64 nodes");
  NetworkState state(n);
  for (std::size_t i = 0; i < n; ++i) state.set(i, (code >> i) & 1U);
  return state;
}

std::uint64_t NetworkState::code() const {
  if (size() > 64) throw DomainError("state codes are limited to 64 nodes");
  return size() == 0 ? 0 : bits_.words()[0];
}

std::vector<Violation> validate(const PbnModel& model) {
  std::vector<Violation> out;
  auto add = [&out](std::optional<std::size_t> node, std::string rule, std::string message) {
    out.push_back({node, std::move(rule), std::move(message)});
  };

  if (model.n == 0) add(std::nullopt, "node-count", "a model needs at least one node");
  if (model.functions.size() != model.n) {
    add(std::nullopt, "node-count",
        "expected " + std::to_string(model.n) + " function sets, found " + std::to_string(model.functions.size()));
  }
  if (!(model.perturbation > 0.0 && model.perturbation < 1.0)) {
    std::ostringstream msg;
    msg << "perturbation probability " << model.perturbation << " is outside (0,1)";
    add(std::nullopt, "perturbation-range", msg.str());
  }
  if (!model.names.empty() && model.names.size() != model.n) {
    add(std::nullopt, "names", "names must be empty or have one entry per node");
  }

  for (std::size_t i = 0; i < model.functions.size(); ++i) {
    const auto& set = model.functions[i];
    if (set.empty()) {
      add(i, "function-count", "node " + std::to_string(i) + " has no predictor function");
      continue;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < set.size(); ++j) {
      const PredictorFunction& f = set[j];
      const std::string where = "node " + std::to_string(i) + " function " + std::to_string(j);
      if (!(f.probability > 0.0 && f.probability <= 1.0)) {
        std::ostringstream msg;
        msg << where << ": selection probability " << f.probability << " is outside (0,1]";
        add(i, "probability-range", msg.str());
      }
      sum += f.probability;
      if (f.parents.size() > kMaxParents) {
        add(i, "parent-count", where + ": " + std::to_string(f.parents.size()) + " parents exceed the limit of " +
                                   std::to_string(kMaxParents));
        continue;
      }
      std::unordered_set<std::uint32_t> seen;
      for (const std::uint32_t p : f.parents) {
        if (p >= model.n) {
          add(i, "parent-range", where + ": parent index " + std::to_string(p) + " is out of range");
        } else if (!seen.insert(p).second) {
          add(i, "parent-distinct", where + ": parent index " + std::to_string(p) + " is repeated");
        }
      }
      const std::size_t expected = std::size_t{1} << f.parents.size();
      if (f.table.size() != expected) {
        add(i, "table-length", where + ": truth table has " + std::to_string(f.table.size()) + " entries, expected " +
                                   std::to_string(expected));
      }
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "node " << i << ": selection probabilities sum to " << sum << ", expected 1";
      add(i, "probability-sum", msg.str());
    }
  }
  return out;
}

void require_valid(const PbnModel& model) {
  const auto violations = validate(model);
  if (violations.empty()) return;
  std::string message = "invalid model: " + violations.front().message;
  if (violations.size() > 1) message += " (+" + std::to_string(violations.size() - 1) + " more)";
  throw DomainError(message);
}

double density(const PbnModel& model) {
  std::size_t parents = 0;
  for (const auto& set : model.functions) {
    for (const auto& f : set) parents += f.parents.size();
  }
  return static_cast<double>(parents) / static_cast<double>(model.n);
}

std::uint64_t realisation_count(const PbnModel& model) {
  std::uint64_t total = 1;
  for (const auto& set : model.functions) {
    if (set.empty()) return 0;
    if (total > std::numeric_limits<std::uint64_t>::max() / set.size()) return std::numeric_limits<std::uint64_t>::max();
    total *= set.size();
  }
  return total;
}

NetworkState apply_realisation(const PbnModel& model, const Realisation& realisation, const NetworkState& state) {
  NetworkState next(model.n);
  for (std::size_t i = 0; i < model.n; ++i) {
    next.set(i, model.functions[i][realisation.choice[i]].evaluate(state));
  }
  return next;
}

double realisation_probability(const PbnModel& model, const Realisation& realisation) {
  double p = 1.0;
  for (std::size_t i = 0; i < model.n; ++i) p *= model.functions[i][realisation.choice[i]].probability;
  return p;
}

}  // namespace pbnssa
