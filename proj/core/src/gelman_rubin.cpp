#include "pbnssa/gelman_rubin.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pbnssa/errors.hpp"
#include "pbnssa/stats.hpp"

namespace pbnssa {

PsrfReport psrf(const std::vector<WindowMoments>& windows, std::size_t psi) {
  if (windows.size() < 2) throw DomainError("psrf: need at least two chains");
  if (psi < 2) throw DomainError("psrf: window length must be at least 2");
  const double omega = static_cast<double>(windows.size());
  const double len = static_cast<double>(psi);
  double mu = 0.0;
  double within = 0.0;
  for (const auto& w : windows) {
    mu += w.mean;
    within += w.variance;
  }
  mu /= omega;
  within /= omega;
  double between = 0.0;
  for (const auto& w : windows) between += (w.mean - mu) * (w.mean - mu);
  between *= len / (omega - 1.0);

  PsrfReport out;
  out.between = between;
  out.within = within;
  out.psi = psi;
  out.omega = windows.size();
  if (!(within > 0.0)) throw DegenerateError("psrf: within-chain variance is zero (all chains constant)");
  out.sigma2_hat = (1.0 - 1.0 / len) * within + between / len;
  out.r_hat = std::sqrt(out.sigma2_hat / within);
  return out;
}

PsrfReport psrf(const std::vector<std::vector<double>>& windows) {
  if (windows.empty()) throw DomainError("psrf: need at least two chains");
  const std::size_t psi = windows.front().size();
  std::vector<WindowMoments> moments;
  moments.reserve(windows.size());
  for (const auto& w : windows) {
    if (w.size() != psi) throw DomainError("psrf: windows must have equal length");
    if (psi < 2) throw DomainError("psrf: window length must be at least 2");
    const MomentSummary s = summarize(w);
    moments.push_back({s.mean, s.variance});
  }
  return psrf(moments, psi);
}

namespace {

std::vector<WindowMoments> bit_windows(const ChainSet& set, std::size_t property, std::size_t first,
                                       std::size_t psi) {
  std::vector<WindowMoments> out;
  const double len = static_cast<double>(psi);
  for (const Chain& chain : set.chains) {
    // For 0-1 data with c ones: mean c/psi, sum of squared deviations c - c^2/psi.
    const auto c = static_cast<double>(chain.history(property).count(first, first + psi));
    out.push_back({c / len, (c - c * c / len) / (len - 1.0)});
  }
  return out;
}

}  // namespace

PsrfReport psrf(const ChainSet& set, std::size_t property, std::size_t first, std::size_t psi) {
  if (set.length() < first + psi) throw DomainError("psrf: window exceeds the chain length");
  return psrf(bit_windows(set, property, first, psi), psi);
}

std::optional<double> max_rhat(const ChainSet& set, std::size_t first, std::size_t psi) {
  std::optional<double> worst;
  for (std::size_t k = 0; k < set.properties.size(); ++k) {
    if (set.properties[k].constraints.empty()) continue;
    const auto windows = bit_windows(set, k, first, psi);
    double r;
    try {
      r = psrf(windows, psi).r_hat;
    } catch (const DegenerateError&) {
      bool agree = true;
      for (const auto& w : windows) agree = agree && w.mean == windows.front().mean;
      if (agree) continue;
      r = std::numeric_limits<double>::infinity();
    }
    worst = worst ? std::max(*worst, r) : r;
  }
  return worst;
}

void check(const ConvergenceSettings& settings) {
  if (settings.omega < 2) throw DomainError("the convergence check needs at least two chains");
  if (settings.psi0 < 2) throw DomainError("psi0 must be at least 2");
  if (!(settings.threshold > 1.0)) throw DomainError("the R-hat threshold must exceed 1");
}

ConvergedChains generate_converged_chains(const Simulator& simulator, std::vector<MetaProperty> properties,
                                          const ConvergenceSettings& settings, std::uint64_t seed,
                                          unsigned workers, const RunLimits& limits) {
  check(settings);
  if (properties.empty()) throw DomainError("generate_converged_chains: no property registered");
  ConvergedChains out{make_chain_set(simulator, std::move(properties), settings.omega, seed), 0, {}};
  std::size_t psi = settings.psi0;
  while (true) {
    if (2 * psi * settings.omega > limits.cap) {
      std::ostringstream msg;
      msg << "chains did not converge before the step cap; R-hat trace:";
      for (const double r : out.rhat_trace) msg << ' ' << r;
      throw NonConvergenceError(msg.str(), out.rhat_trace);
    }
    extend_chains_to(simulator, out.set, 2 * psi, workers);
    const std::optional<double> r = max_rhat(out.set, psi, psi);
    out.rhat_trace.push_back(r ? *r : std::numeric_limits<double>::quiet_NaN());
    if (r && std::isfinite(*r) && *r < settings.threshold) {
      out.psi = psi;
      out.set.psi = psi;
      return out;
    }
    psi *= 2;
  }
}

}  // namespace pbnssa
