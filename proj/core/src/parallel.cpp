#include "pbnssa/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pbnssa/errors.hpp"

namespace pbnssa {

void check(const ParallelSettings& settings) {
  if (settings.omega < 2) throw DomainError("parallel estimation needs at least two chains");
  if (settings.psi0 < 2) throw DomainError("psi0 must be at least 2");
  if (!(settings.rhat_threshold > 1.0)) throw DomainError("the R-hat threshold must exceed 1");
  if (settings.workers == 0) throw DomainError("workers must be at least 1");
}

TransitionCounts merged_transitions(const ChainSet& set, std::size_t property, std::size_t first, std::size_t n) {
  TransitionCounts total;
  for (const Chain& chain : set.chains) total += count_transitions(chain.history(property), first, first + n);
  return total;
}

namespace {

std::size_t merged_ones(const ChainSet& set, std::size_t property, std::size_t first, std::size_t n) {
  std::size_t ones = 0;
  for (const Chain& chain : set.chains) ones += chain.history(property).count(first, first + n);
  return ones;
}

std::string describe_merged(std::size_t ones, std::size_t pooled, const TransitionCounts& c) {
  if (ones == pooled) return "always in meta state 1";
  if (ones == 0) return "never in meta state 1";
  if (c.n01 == 0) return "no transition from meta state 0 to meta state 1 observed";
  if (c.n10 == 0) return "no transition from meta state 1 to meta state 0 observed";
  return "meta states alternate deterministically";
}

struct PropertyState {
  TransitionCounts counts;
  TwoStateParams params;
  bool defined = false;
  std::size_t M = 0;
  std::size_t N = 0;
};

ConvergenceSettings convergence_settings(const ParallelSettings& parallel) {
  return {parallel.omega, parallel.psi0, parallel.rhat_threshold};
}

}  // namespace

MultiPropertyResult parallel_two_state(const Simulator& simulator, const std::vector<MetaProperty>& properties,
                                       const TwoStateSettings& settings, const ParallelSettings& parallel,
                                       std::uint64_t seed, const RunLimits& limits) {
  check(settings);
  check(parallel);
  if (properties.empty()) throw DomainError("parallel_two_state: no property registered");
  const auto started = std::chrono::steady_clock::now();

  MultiPropertyResult out;
  out.omega = parallel.omega;
  out.properties.resize(properties.size());
  std::vector<std::size_t> active;
  std::vector<MetaProperty> monitored;
  for (std::size_t k = 0; k < properties.size(); ++k) {
    if (properties[k].constraints.empty()) {
      out.properties[k].estimate = 1.0;
      out.properties[k].status = EstimateStatus::degenerate;
      out.properties[k].diagnostic = "always in meta state 1";
    } else {
      active.push_back(k);
      monitored.push_back(properties[k]);
    }
  }
  if (active.empty()) {
    out.wall_time = std::chrono::steady_clock::now() - started;
    for (auto& r : out.properties) r.wall_time = out.wall_time;
    return out;
  }

  ConvergedChains converged = generate_converged_chains(simulator, std::move(monitored),
                                                        convergence_settings(parallel), seed, parallel.workers, limits);
  ChainSet& set = converged.set;
  const std::size_t omega = set.omega();
  std::size_t psi = converged.psi;
  std::size_t n = set.length() - psi;
  std::vector<PropertyState> state(active.size());

  while (true) {
    const std::size_t pooled = omega * n;
    std::size_t target = std::numeric_limits<std::size_t>::max();
    for (std::size_t j = 0; j < active.size(); ++j) {
      PropertyState& s = state[j];
      s.counts = merged_transitions(set, j, psi, n);
      s.params = params_from_counts(s.counts);
      s.defined = formulas_defined(s.params);
      if (s.defined) {
        s.M = burn_in_M(s.params, settings.epsilon);
        s.N = sample_size_N(s.params, settings.r, settings.s);
        if (s.N > pooled) target = std::min(target, s.N);
      } else {
        target = std::min(target, 2 * pooled);
      }
    }

    if (target == std::numeric_limits<std::size_t>::max()) {
      std::size_t max_m = 0;
      for (const PropertyState& s : state) max_m = std::max(max_m, s.M);
      if (max_m <= psi) break;
      const std::size_t shift = max_m - psi;
      psi = max_m;
      n = n > shift ? n - shift : 0;
      continue;
    }

    const std::size_t missing = target > pooled ? target - pooled : 0;
    const std::size_t extend_by = std::max<std::size_t>(1, (missing + omega - 1) / omega);
    if ((psi + n + extend_by) * omega > limits.cap) break;
    extend_chains(simulator, set, extend_by, parallel.workers);
    n += extend_by;
    ++out.extensions;
  }

  out.wall_time = std::chrono::steady_clock::now() - started;
  out.psi = psi;
  out.per_chain = n;
  out.total_sample_size = omega * n;
  out.steps_simulated = set.total_steps();
  out.rhat_trace = converged.rhat_trace;
  for (std::size_t j = 0; j < active.size(); ++j) {
    const PropertyState& s = state[j];
    EstimateResult& r = out.properties[active[j]];
    const std::size_t ones = merged_ones(set, j, psi, n);
    r.estimate = n == 0 ? 0.0 : static_cast<double>(ones) / static_cast<double>(omega * n);
    r.sample_size = omega * n;
    r.burn_in = psi;
    r.steps_simulated = out.steps_simulated;
    r.extensions = out.extensions;
    r.wall_time = out.wall_time;
    if (!s.defined) {
      r.status = n == 0 ? EstimateStatus::cap_exceeded : EstimateStatus::degenerate;
      r.diagnostic = n == 0 ? "no samples fit within the step cap" : describe_merged(ones, omega * n, s.counts);
      continue;
    }
    r.required_burn_in = s.M;
    r.required_sample_size = s.N;
    if (s.N > omega * n) {
      r.status = EstimateStatus::cap_exceeded;
      r.diagnostic = "required sample size " + std::to_string(s.N) + " exceeds the step cap";
    } else if (s.M > psi) {
      r.status = EstimateStatus::cap_exceeded;
      r.diagnostic = "required burn-in " + std::to_string(s.M) + " exceeds the step cap";
    }
  }
  return out;
}

ParallelSkartResult parallel_skart(const Simulator& simulator, const MetaProperty& property,
                                   const SkartSettings& settings, const ParallelSettings& parallel,
                                   std::uint64_t seed, const RunLimits& limits) {
  check(settings);
  check(parallel);
  const auto started = std::chrono::steady_clock::now();
  ParallelSkartResult out;
  out.omega = parallel.omega;
  if (property.constraints.empty()) {
    out.estimate.estimate = 1.0;
    out.estimate.ci_low = out.estimate.ci_high = 1.0;
    out.estimate.status = EstimateStatus::degenerate;
    out.estimate.diagnostic = "always in meta state 1";
    out.estimate.wall_time = std::chrono::steady_clock::now() - started;
    return out;
  }
  ConvergedChains converged =
      generate_converged_chains(simulator, {property}, convergence_settings(parallel), seed, parallel.workers, limits);
  out.psi = converged.psi;
  out.rhat_trace = std::move(converged.rhat_trace);
  out.estimate = skart_on_chains(simulator, converged.set, converged.psi, settings, SkartLayout::multi_chain,
                                 parallel.workers, limits);
  out.estimate.wall_time = std::chrono::steady_clock::now() - started;
  return out;
}

Speedup speedup_metrics(double t_seq, double t_par, double size_seq, double size_par) {
  for (const double v : {t_seq, t_par, size_seq, size_par}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("speedup_metrics: inputs must be positive and finite");
  }
  Speedup s;
  s.speedup = t_seq / t_par;
  s.speedup_e = s.speedup * size_par / size_seq;
  return s;
}

}  // namespace pbnssa
