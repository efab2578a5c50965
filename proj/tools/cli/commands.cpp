#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pbnssa/errors.hpp"
#include "pbnssa/exact.hpp"
#include "pbnssa/model_io.hpp"
#include "pbnssa/parallel.hpp"
#include "pbnssa/random_model.hpp"
#include "pbnssa/skart.hpp"
#include "pbnssa/two_state.hpp"

namespace pbnssa::cli {

using nlohmann::json;

namespace {

/// Error with a chosen exit code.
struct Failure {
  int code;
  std::string message;
};

struct Range {
  std::size_t low = 0;
  std::size_t high = 0;
};

Range parse_range(const std::string& text, const char* flag) {
  const auto colon = text.find(':');
  auto number = [&](std::string_view part) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw Failure{kExitUsage, std::string(flag) + " expects lo:hi, got '" + text + "'"};
    }
    return v;
  };
  if (colon == std::string::npos) {
    const std::size_t v = number(text);
    return {v, v};
  }
  const std::string_view view(text);
  return {number(view.substr(0, colon)), number(view.substr(colon + 1))};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitIo, "cannot open " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << text)) throw Failure{kExitIo, "cannot write " + path};
}

PbnModel read_model(const std::string& path) {
  try {
    return parse_model(read_file(path));
  } catch (const ParseError& e) {
    throw Failure{kExitIo, path + ": " + e.what()};
  }
}

std::vector<MetaProperty> read_properties(const std::string& path, std::size_t n) {
  std::vector<MetaProperty> props;
  try {
    props = parse_properties(read_file(path));
  } catch (const ParseError& e) {
    throw Failure{kExitIo, path + ": " + e.what()};
  }
  if (props.empty()) throw Failure{kExitIo, path + ": no properties"};
  for (const auto& p : props) {
    const auto problems = validate(p, n);
    if (!problems.empty()) throw Failure{kExitIo, path + ": property '" + p.name + "': " + problems.front()};
  }
  return props;
}

TwoStateSettings two_state_settings(const RunSettings& s) { return {s.m0, s.n0, s.epsilon, s.precision, s.confidence}; }

SkartSettings skart_settings(const RunSettings& s) {
  SkartSettings out;
  out.h_star = s.h_star;
  out.alpha = s.alpha;
  return out;
}

ParallelSettings parallel_settings(const RunSettings& s, unsigned workers) {
  return {s.omega, s.psi0, s.rhat_threshold, workers};
}

std::string format12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

unsigned default_workers() {
  if (const char* env = std::getenv("PBNSSA_WORKERS")) {
    unsigned v = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc{} && ptr == text.data() + text.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RunRecord execute(const PbnModel& model, RunRecord record) {
  const auto started = std::chrono::steady_clock::now();
  const RunSettings& s = record.settings;
  const Simulator simulator(model, {s.perturbation_mode, s.initial_state});
  const RunLimits limits{s.cap};
  record.model_hash = model_hash(model);
  record.nodes = model.n;
  record.results.clear();
  record.rhat_trace.clear();
  record.psi = 0;
  record.total_sample_size = 0;

  switch (record.method) {
    case Method::two_state:
      for (const auto& p : record.properties) {
        record.results.push_back({p.name, run_sequential(simulator, p, two_state_settings(s), record.seed, limits)});
      }
      break;
    case Method::skart:
      for (const auto& p : record.properties) {
        record.results.push_back({p.name, skart_run(simulator, p, skart_settings(s), record.seed, limits)});
      }
      break;
    case Method::par_two_state: {
      const MultiPropertyResult r = parallel_two_state(simulator, record.properties, two_state_settings(s),
                                                       parallel_settings(s, record.workers), record.seed, limits);
      for (std::size_t k = 0; k < record.properties.size(); ++k) {
        record.results.push_back({record.properties[k].name, r.properties[k]});
      }
      record.psi = r.psi;
      record.total_sample_size = r.total_sample_size;
      record.rhat_trace = r.rhat_trace;
      break;
    }
    case Method::par_skart:
      for (const auto& p : record.properties) {
        ParallelSkartResult r =
            parallel_skart(simulator, p, skart_settings(s), parallel_settings(s, record.workers), record.seed, limits);
        record.results.push_back({p.name, r.estimate});
        record.psi = std::max(record.psi, r.psi);
        record.rhat_trace.insert(record.rhat_trace.end(), r.rhat_trace.begin(), r.rhat_trace.end());
      }
      break;
  }
  record.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return record;
}

int exit_code(const RunRecord& record) {
  bool degenerate = false;
  for (const auto& r : record.results) {
    if (r.result.status == EstimateStatus::cap_exceeded) return kExitNonConvergence;
    degenerate = degenerate || r.result.status == EstimateStatus::degenerate;
  }
  return degenerate ? kExitDegenerate : kExitOk;
}

namespace {

void add_settings_flags(CLI::App& cmd, RunSettings& s) {
  cmd.add_option("--precision", s.precision, "Two-state precision r")->capture_default_str();
  cmd.add_option("--confidence", s.confidence, "Two-state confidence s")->capture_default_str();
  cmd.add_option("--epsilon", s.epsilon, "Two-state burn-in accuracy")->capture_default_str();
  cmd.add_option("--m0", s.m0, "Initial burn-in")->capture_default_str();
  cmd.add_option("--n0", s.n0, "Initial sample size")->capture_default_str();
  cmd.add_option("--hstar", s.h_star, "Batch-means half-width target")->capture_default_str();
  cmd.add_option("--alpha", s.alpha, "Batch-means interval level is 1 - alpha")->capture_default_str();
  cmd.add_option("--omega", s.omega, "Chains for parallel methods")->capture_default_str();
  cmd.add_option("--psi0", s.psi0, "Initial convergence window")->capture_default_str();
  cmd.add_option("--rhat-threshold", s.rhat_threshold, "Convergence threshold")->capture_default_str();
  cmd.add_option("--cap", s.cap, "Step cap over all chains")->capture_default_str();
}

int cmd_generate(const RandomPbnSpec& base, const std::string& fn, const std::string& parents,
                 const std::string& path, std::ostream& out) {
  RandomPbnSpec spec = base;
  const Range f = parse_range(fn, "--fn");
  const Range k = parse_range(parents, "--parents");
  spec.min_functions = f.low;
  spec.max_functions = f.high;
  spec.min_parents = k.low;
  spec.max_parents = k.high;
  PbnModel model;
  try {
    model = random_pbn(spec);
  } catch (const DomainError& e) {
    throw Failure{kExitUsage, e.what()};
  }
  emit(serialize_model(model), path, out);
  return kExitOk;
}

void emit_record(const RunRecord& record, const std::string& format, const std::string& path, std::ostream& out) {
  emit(format == "csv" ? to_csv(record) : to_json_text(record), path, out);
}

RunRecord run_or_fail(const PbnModel& model, const RunRecord& record) {
  try {
    return execute(model, record);
  } catch (const NonConvergenceError& e) {
    throw Failure{kExitNonConvergence, e.what()};
  } catch (const DomainError& e) {
    throw Failure{kExitUsage, e.what()};
  }
}

int cmd_analyze(RunRecord record, const std::string& model_path, const std::string& properties_path,
                const std::string& format, const std::string& path, std::ostream& out) {
  const PbnModel model = read_model(model_path);
  record.model_path = std::filesystem::absolute(model_path).string();
  record.properties = read_properties(properties_path, model.n);
  const RunRecord done = run_or_fail(model, record);
  emit_record(done, format, path, out);
  return exit_code(done);
}

int cmd_replay(const std::string& record_path, unsigned workers_override, std::ostream& out) {
  RunRecord record;
  try {
    record = parse_record(read_file(record_path));
  } catch (const ParseError& e) {
    throw Failure{kExitIo, record_path + ": " + e.what()};
  }
  const PbnModel model = read_model(record.model_path);
  if (model_hash(model) != record.model_hash) {
    throw Failure{kExitIo, record.model_path + " no longer matches the recorded model hash"};
  }
  if (workers_override > 0) record.workers = workers_override;
  const RunRecord again = run_or_fail(model, record);
  bool same = again.results.size() == record.results.size();
  for (std::size_t k = 0; same && k < again.results.size(); ++k) {
    const double was = record.results[k].result.estimate;
    const double now = round12(again.results[k].result.estimate);
    out << again.results[k].property << ": recorded " << format12(was) << ", replayed " << format12(now) << '\n';
    same = was == now;
  }
  out << (same ? "identical\n" : "MISMATCH\n");
  return same ? kExitOk : kExitMismatch;
}

double default_tolerance(const RunRecord& r) {
  return r.method == Method::skart || r.method == Method::par_skart ? r.settings.h_star : r.settings.precision;
}

int cmd_compare(const std::vector<std::string>& paths, double precision, const std::string& format,
                const std::string& path, std::ostream& out) {
  if (paths.size() < 2) throw Failure{kExitUsage, "compare needs at least two run records"};
  std::vector<RunRecord> records;
  for (const auto& p : paths) {
    try {
      records.push_back(parse_record(read_file(p)));
    } catch (const ParseError& e) {
      throw Failure{kExitIo, p + ": " + e.what()};
    }
  }
  for (const auto& r : records) {
    if (r.model_hash != records.front().model_hash) {
      throw Failure{kExitUsage, "run records refer to different models; refusing to compare"};
    }
  }
  const RunRecord& base = records.front();
  const double r = precision > 0.0 ? precision : default_tolerance(base);
  json rows = json::array();
  for (std::size_t i = 1; i < records.size(); ++i) {
    const RunRecord& other = records[i];
    for (const auto& a : base.results) {
      const auto b = std::find_if(other.results.begin(), other.results.end(),
                                  [&](const PropertyResult& x) { return x.property == a.property; });
      if (b == other.results.end()) continue;
      const double diff = std::abs(a.result.estimate - b->result.estimate);
      json row = {
          {"property", a.property},
          {"method_a", std::string(to_string(base.method))},
          {"method_b", std::string(to_string(other.method))},
          {"estimate_a", round12(a.result.estimate)},
          {"estimate_b", round12(b->result.estimate)},
          {"difference", round12(diff)},
          {"limit", round12(2.0 * r)},
          {"exceeds", diff >= 2.0 * r},
          {"speedup", nullptr},
          {"speedup_e", nullptr},
      };
      if (base.wall_time > 0.0 && other.wall_time > 0.0 && a.result.sample_size > 0 && b->result.sample_size > 0) {
        const Speedup sp = speedup_metrics(base.wall_time, other.wall_time, static_cast<double>(a.result.sample_size),
                                           static_cast<double>(b->result.sample_size));
        row["speedup"] = round12(sp.speedup);
        row["speedup_e"] = round12(sp.speedup_e);
      }
      rows.push_back(row);
    }
  }
  if (format == "json") {
    emit(rows.dump(2) + "\n", path, out);
    return kExitOk;
  }
  std::ostringstream csv;
  csv << "property,method_a,method_b,estimate_a,estimate_b,difference,limit,exceeds,speedup,speedup_e\n";
  auto num = [](const json& x) { return x.is_null() ? std::string() : format12(x.get<double>()); };
  for (const auto& row : rows) {
    csv << row["property"].get<std::string>() << ',' << row["method_a"].get<std::string>() << ','
        << row["method_b"].get<std::string>() << ',' << num(row["estimate_a"]) << ',' << num(row["estimate_b"]) << ','
        << num(row["difference"]) << ',' << num(row["limit"]) << ',' << (row["exceeds"].get<bool>() ? 1 : 0) << ','
        << num(row["speedup"]) << ',' << num(row["speedup_e"]) << '\n';
  }
  emit(csv.str(), path, out);
  return kExitOk;
}

int cmd_exact(const std::string& model_path, const std::string& properties_path, std::ostream& out) {
  const PbnModel model = read_model(model_path);
  const auto props = read_properties(properties_path, model.n);
  if (model.n > kExactMaxNodes) {
    throw Failure{kExitUsage, "exact analysis supports at most " + std::to_string(kExactMaxNodes) + " nodes"};
  }
  const ExactDistribution pi = exact_steady_state(model);
  json rows = json::array();
  for (const auto& p : props) rows.push_back({{"property", p.name}, {"probability", round12(meta_probability(pi, p))}});
  out << rows.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steady-state analysis of probabilistic Boolean networks", "pbnssa"};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand("generate", "Write a random network");
  RandomPbnSpec gen_spec;
  std::string gen_fn;
  std::string gen_parents;
  std::string gen_out;
  generate->add_option("--nodes", gen_spec.nodes, "Number of nodes")->required();
  generate->add_option("--fn", gen_fn, "Functions per node, lo:hi")->required();
  generate->add_option("--parents", gen_parents, "Parents per function, lo:hi")->required();
  generate->add_option("--perturbation", gen_spec.perturbation, "Perturbation probability")->capture_default_str();
  generate->add_option("--seed", gen_spec.seed, "Generator seed")->capture_default_str();
  generate->add_option("-o,--out", gen_out, "Output file (default stdout)");

  auto* analyze = app.add_subcommand("analyze", "Estimate steady-state probabilities");
  RunRecord rec;
  rec.workers = default_workers();
  std::string model_path;
  std::string properties_path;
  std::string method = "two-state";
  std::string format = "json";
  std::string out_path;
  std::string perturbation_mode = "bernoulli";
  std::string initial_state = "uniform";
  analyze->add_option("--model", model_path, "Model file")->required();
  analyze->add_option("--properties", properties_path, "Property file")->required();
  analyze->add_option("--method", method, "two-state | skart | par-two-state | par-skart")
      ->check(CLI::IsMember({"two-state", "skart", "par-two-state", "par-skart"}))
      ->capture_default_str();
  add_settings_flags(*analyze, rec.settings);
  analyze->add_option("--workers", rec.workers, "Worker threads (default $PBNSSA_WORKERS or all cores)");
  analyze->add_option("--seed", rec.seed, "Master seed")->capture_default_str();
  analyze->add_option("--perturbation-mode", perturbation_mode, "bernoulli | geometric")
      ->check(CLI::IsMember({"bernoulli", "geometric"}))
      ->capture_default_str();
  analyze->add_option("--initial-state", initial_state, "uniform | all-zero")
      ->check(CLI::IsMember({"uniform", "all-zero"}))
      ->capture_default_str();
  analyze->add_option("--out", out_path, "Output file (default stdout)");
  analyze->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  auto* compare = app.add_subcommand("compare", "Pair estimates of run records and report speed-ups");
  std::vector<std::string> record_paths;
  double cmp_precision = 0.0;
  std::string cmp_format = "csv";
  std::string cmp_out;
  compare->add_option("records", record_paths, "Run records (JSON)")->required();
  compare->add_option("--precision", cmp_precision, "Pairs differing by 2 r or more are flagged (default from first record)");
  compare->add_option("--format", cmp_format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  compare->add_option("--out", cmp_out, "Output file (default stdout)");

  auto* replay = app.add_subcommand("replay", "Re-run a run record and check the estimates");
  std::string replay_path;
  unsigned replay_workers = 0;
  replay->add_option("record", replay_path, "Run record (JSON)")->required();
  replay->add_option("--workers", replay_workers, "Override the recorded worker count");

  auto* exact = app.add_subcommand("exact", "Exact probabilities for networks of up to 20 nodes");
  std::string exact_model;
  std::string exact_props;
  exact->add_option("--model", exact_model, "Model file")->required();
  exact->add_option("--properties", exact_props, "Property file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(gen_spec, gen_fn, gen_parents, gen_out, out);
    if (*analyze) {
      rec.method = parse_method(method);
      rec.settings.perturbation_mode = parse_perturbation_mode(perturbation_mode);
      rec.settings.initial_state = parse_initial_state_mode(initial_state);
      if (rec.workers == 0) throw Failure{kExitUsage, "--workers must be at least 1"};
      return cmd_analyze(rec, model_path, properties_path, format, out_path, out);
    }
    if (*compare) return cmd_compare(record_paths, cmp_precision, cmp_format, cmp_out, out);
    if (*replay) return cmd_replay(replay_path, replay_workers, out);
    if (*exact) return cmd_exact(exact_model, exact_props, out);
  } catch (const Failure& f) {
    err << "pbnssa: " << f.message << '\n';
    return f.code;
  } catch (const DomainError& e) {
    err << "pbnssa: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NonConvergenceError& e) {
    err << "pbnssa: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const Error& e) {
    err << "pbnssa: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace pbnssa::cli
