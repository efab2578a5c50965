#include "run_record.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "pbnssa/errors.hpp"

namespace pbnssa::cli {

using nlohmann::json;

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::two_state:
      return "two-state";
    case Method::skart:
      return "skart";
    case Method::par_two_state:
      return "par-two-state";
    case Method::par_skart:
      return "par-skart";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  for (const Method m : {Method::two_state, Method::skart, Method::par_two_state, Method::par_skart}) {
    if (to_string(m) == text) return m;
  }
  throw DomainError("unknown method '" + std::string(text) + "'");
}

bool is_parallel(Method method) noexcept {
  return method == Method::par_two_state || method == Method::par_skart;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

namespace {

std::string format12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

EstimateStatus parse_status(const std::string& text) {
  for (const auto s : {EstimateStatus::ok, EstimateStatus::degenerate, EstimateStatus::cap_exceeded}) {
    if (to_string(s) == text) return s;
  }
  throw ParseError("status", "unknown status '" + text + "'");
}

json optional_number(const std::optional<double>& x) { return x ? json(round12(*x)) : json(nullptr); }

std::optional<double> read_optional(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json settings_json(const RunSettings& s) {
  return {
      {"precision", round12(s.precision)},
      {"confidence", round12(s.confidence)},
      {"epsilon", round12(s.epsilon)},
      {"m0", s.m0},
      {"n0", s.n0},
      {"hstar", round12(s.h_star)},
      {"alpha", round12(s.alpha)},
      {"omega", s.omega},
      {"psi0", s.psi0},
      {"rhat_threshold", round12(s.rhat_threshold)},
      {"cap", s.cap},
      {"perturbation_mode", std::string(to_string(s.perturbation_mode))},
      {"initial_state", std::string(to_string(s.initial_state))},
  };
}

RunSettings settings_from_json(const json& j) {
  RunSettings s;
  s.precision = j.at("precision").get<double>();
  s.confidence = j.at("confidence").get<double>();
  s.epsilon = j.at("epsilon").get<double>();
  s.m0 = j.at("m0").get<std::size_t>();
  s.n0 = j.at("n0").get<std::size_t>();
  s.h_star = j.at("hstar").get<double>();
  s.alpha = j.at("alpha").get<double>();
  s.omega = j.at("omega").get<std::size_t>();
  s.psi0 = j.at("psi0").get<std::size_t>();
  s.rhat_threshold = j.at("rhat_threshold").get<double>();
  s.cap = j.at("cap").get<std::size_t>();
  s.perturbation_mode = parse_perturbation_mode(j.at("perturbation_mode").get<std::string>());
  s.initial_state = parse_initial_state_mode(j.at("initial_state").get<std::string>());
  return s;
}

json result_json(const PropertyResult& pr) {
  const EstimateResult& r = pr.result;
  return {
      {"property", pr.property},
      {"estimate", round12(r.estimate)},
      {"ci_low", optional_number(r.ci_low)},
      {"ci_high", optional_number(r.ci_high)},
      {"sample_size", r.sample_size},
      {"burn_in", r.burn_in},
      {"steps_simulated", r.steps_simulated},
      {"extensions", r.extensions},
      {"status", std::string(to_string(r.status))},
      {"diagnostic", r.diagnostic},
      {"required_burn_in", r.required_burn_in},
      {"required_sample_size", r.required_sample_size},
      {"batch_size", r.batch_size},
      {"batch_count", r.batch_count},
      {"spacer", r.spacer},
      {"wall_time", round12(r.wall_time.count())},
  };
}

PropertyResult result_from_json(const json& j) {
  PropertyResult pr;
  pr.property = j.at("property").get<std::string>();
  EstimateResult& r = pr.result;
  r.estimate = j.at("estimate").get<double>();
  r.ci_low = read_optional(j.at("ci_low"));
  r.ci_high = read_optional(j.at("ci_high"));
  r.sample_size = j.at("sample_size").get<std::size_t>();
  r.burn_in = j.at("burn_in").get<std::size_t>();
  r.steps_simulated = j.at("steps_simulated").get<std::size_t>();
  r.extensions = j.at("extensions").get<std::size_t>();
  r.status = parse_status(j.at("status").get<std::string>());
  r.diagnostic = j.at("diagnostic").get<std::string>();
  r.required_burn_in = j.at("required_burn_in").get<std::size_t>();
  r.required_sample_size = j.at("required_sample_size").get<std::size_t>();
  r.batch_size = j.at("batch_size").get<std::size_t>();
  r.batch_count = j.at("batch_count").get<std::size_t>();
  r.spacer = j.at("spacer").get<std::size_t>();
  r.wall_time = std::chrono::duration<double>(j.at("wall_time").get<double>());
  return pr;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_optional(const std::optional<double>& x) { return x ? format12(*x) : std::string(); }

}  // namespace

json to_json(const RunRecord& record) {
  json results = json::array();
  for (const auto& r : record.results) results.push_back(result_json(r));
  json trace = json::array();
  for (const double r : record.rhat_trace) trace.push_back(std::isfinite(r) ? json(round12(r)) : json(nullptr));
  return {
      {"format", "pbnssa-run-1"},
      {"model", {{"path", record.model_path}, {"hash", record.model_hash}, {"nodes", record.nodes}}},
      {"method", std::string(to_string(record.method))},
      {"settings", settings_json(record.settings)},
      {"properties", json::parse(serialize_properties(record.properties))},
      {"omega", is_parallel(record.method) ? record.settings.omega : 1},
      {"workers", record.workers},
      {"seed", record.seed},
      {"wall_time", round12(record.wall_time)},
      {"psi", record.psi},
      {"total_sample_size", record.total_sample_size},
      {"rhat_trace", trace},
      {"results", results},
  };
}

RunRecord record_from_json(const json& j) {
  try {
    if (j.at("format") != "pbnssa-run-1") throw ParseError("format", "not a run record");
    RunRecord r;
    r.model_path = j.at("model").at("path").get<std::string>();
    r.model_hash = j.at("model").at("hash").get<std::string>();
    r.nodes = j.at("model").at("nodes").get<std::size_t>();
    r.method = parse_method(j.at("method").get<std::string>());
    r.settings = settings_from_json(j.at("settings"));
    r.properties = parse_properties(j.at("properties").dump());
    r.workers = j.at("workers").get<unsigned>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.wall_time = j.at("wall_time").get<double>();
    r.psi = j.at("psi").get<std::size_t>();
    r.total_sample_size = j.at("total_sample_size").get<std::size_t>();
    for (const auto& x : j.at("rhat_trace")) {
      r.rhat_trace.push_back(x.is_null() ? std::numeric_limits<double>::infinity() : x.get<double>());
    }
    for (const auto& x : j.at("results")) r.results.push_back(result_from_json(x));
    return r;
  } catch (const json::exception& e) {
    throw ParseError("run record", e.what());
  } catch (const DomainError& e) {
    throw ParseError("run record", e.what());
  }
}

std::string to_json_text(const RunRecord& record) { return to_json(record).dump(2) + "\n"; }

std::string to_csv(const RunRecord& record) {
  std::ostringstream out;
  out << "model_hash,method,property,estimate,ci_low,ci_high,sample_size,burn_in,steps_simulated,extensions,"
         "status,omega,workers,seed,wall_time,diagnostic\n";
  const std::size_t omega = is_parallel(record.method) ? record.settings.omega : 1;
  for (const auto& pr : record.results) {
    const EstimateResult& r = pr.result;
    out << record.model_hash << ',' << to_string(record.method) << ',' << csv_field(pr.property) << ','
        << format12(r.estimate) << ',' << csv_optional(r.ci_low) << ',' << csv_optional(r.ci_high) << ','
        << r.sample_size << ',' << r.burn_in << ',' << r.steps_simulated << ',' << r.extensions << ','
        << to_string(r.status) << ',' << omega << ',' << record.workers << ',' << record.seed << ','
        << format12(r.wall_time.count()) << ',' << csv_field(r.diagnostic) << '\n';
  }
  return out.str();
}

RunRecord parse_record(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("run record", e.what());
  }
  return record_from_json(j);
}

}  // namespace pbnssa::cli
