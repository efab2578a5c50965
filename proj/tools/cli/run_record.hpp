#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pbnssa/estimate.hpp"
#include "pbnssa/property.hpp"
#include "pbnssa/simulation.hpp"

namespace pbnssa::cli {

enum class Method { two_state, skart, par_two_state, par_skart };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view text);
bool is_parallel(Method method) noexcept;

/// Everything needed to repeat a run.
struct RunSettings {
  double precision = 1e-4;
  double confidence = 0.95;
  double epsilon = 1e-10;
  std::size_t m0 = 100;
  std::size_t n0 = 10'000;
  double h_star = 1e-4;
  double alpha = 0.05;
  std::size_t omega = 4;
  std::size_t psi0 = 1000;
  double rhat_threshold = 1.1;
  std::size_t cap = 1'000'000'000;
  PerturbationMode perturbation_mode = PerturbationMode::bernoulli;
  InitialStateMode initial_state = InitialStateMode::uniform;
};

struct PropertyResult {
  std::string property;
  EstimateResult result;
};

struct RunRecord {
  std::string model_path;
  std::string model_hash;
  std::size_t nodes = 0;
  Method method = Method::two_state;
  RunSettings settings;
  std::vector<MetaProperty> properties;
  unsigned workers = 1;
  std::uint64_t seed = 0;
  double wall_time = 0.0;
  /// Parallel methods only.
  std::size_t psi = 0;
  std::size_t total_sample_size = 0;
  std::vector<double> rhat_trace;
  std::vector<PropertyResult> results;
};

/// x rounded to 12 significant digits; the precision used in every emitted file.
double round12(double x);

nlohmann::json to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& json);

std::string to_json_text(const RunRecord& record);
/// Header plus one row per property.
std::string to_csv(const RunRecord& record);

RunRecord parse_record(std::string_view text);

}  // namespace pbnssa::cli
