#include "pbnssa/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pbnssa/errors.hpp"

namespace pbnssa {
namespace {

using nlohmann::json;

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

const json& require_field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where, std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

std::string table_to_hex(const BitVector& table) {
  const std::size_t digits = (table.size() + 3) / 4;
  std::string out(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    unsigned value = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t index = d * 4 + b;
      if (index < table.size() && table[index]) value |= 1U << b;
    }
    out[digits - 1 - d] = "0123456789abcdef"[value];
  }
  return out;
}

BitVector table_from_hex(std::string_view hex, std::size_t entries) {
  const std::size_t digits = (entries + 3) / 4;
  if (hex.size() != digits) {
    throw ParseError("table", "expected " + std::to_string(digits) + " hex digits for " + std::to_string(entries) +
                                  " entries, found " + std::to_string(hex.size()));
  }
  BitVector table(entries);
  for (std::size_t d = 0; d < digits; ++d) {
    const int value = hex_value(hex[digits - 1 - d]);
    if (value < 0) throw ParseError("table", "invalid hex digit '" + std::string(1, hex[digits - 1 - d]) + "'");
    for (std::size_t b = 0; b < 4; ++b) {
      if (!((value >> b) & 1)) continue;
      const std::size_t index = d * 4 + b;
      if (index >= entries) throw ParseError("table", "bits set beyond the table length");
      table.set(index, true);
    }
  }
  return table;
}

PbnModel parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!doc.is_object()) throw ParseError("", "model document must be a JSON object");

  PbnModel model;
  try {
    const auto& format = require_field(doc, "format", "");
    if (format.get<std::string>() != kModelFormat) {
      throw ParseError("format", "unsupported format '" + format.get<std::string>() + "'");
    }
    model.n = require_field(doc, "n", "").get<std::size_t>();
    model.perturbation = require_field(doc, "perturbation", "").get<double>();
    const auto& nodes = require_field(doc, "nodes", "");
    if (!nodes.is_array()) throw ParseError("nodes", "must be an array");
    if (nodes.size() != model.n) {
      throw ParseError("nodes", "array has " + std::to_string(nodes.size()) + " entries but n = " +
                                    std::to_string(model.n));
    }
    model.functions.resize(model.n);
    for (std::size_t i = 0; i < model.n; ++i) {
      const std::string node_where = "nodes[" + std::to_string(i) + "]";
      if (!nodes[i].is_array()) throw ParseError(node_where, "must be an array of functions");
      for (std::size_t j = 0; j < nodes[i].size(); ++j) {
        const std::string where = node_where + "[" + std::to_string(j) + "]";
        const auto& fn = nodes[i][j];
        if (!fn.is_object()) throw ParseError(where, "must be an object");
        PredictorFunction f;
        f.parents = require_field(fn, "parents", where).get<std::vector<std::uint32_t>>();
        if (f.parents.size() > kMaxParents) {
          throw ParseError(where + ".parents", "more than " + std::to_string(kMaxParents) + " parents");
        }
        f.probability = require_field(fn, "prob", where).get<double>();
        try {
          f.table = table_from_hex(require_field(fn, "table", where).get<std::string>(),
                                   std::size_t{1} << f.parents.size());
        } catch (const ParseError& e) {
          throw ParseError(where + ".table", e.what());
        }
        model.functions[i].push_back(std::move(f));
      }
    }
    if (const auto it = doc.find("names"); it != doc.end()) {
      model.names = it->get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw ParseError("", std::string("type error: ") + e.what());
  }

  const auto violations = validate(model);
  if (!violations.empty()) {
    const Violation& v = violations.front();
    throw ParseError(v.node ? "nodes[" + std::to_string(*v.node) + "]" : std::string{}, v.rule + ": " + v.message);
  }
  return model;
}

std::string serialize_model(const PbnModel& model) {
  json doc;
  doc["format"] = kModelFormat;
  doc["n"] = model.n;
  doc["perturbation"] = model.perturbation;
  json nodes = json::array();
  for (const auto& set : model.functions) {
    json fns = json::array();
    for (const auto& f : set) {
      fns.push_back({{"parents", f.parents}, {"table", table_to_hex(f.table)}, {"prob", f.probability}});
    }
    nodes.push_back(std::move(fns));
  }
  doc["nodes"] = std::move(nodes);
  if (!model.names.empty()) doc["names"] = model.names;
  return doc.dump() + "\n";
}

PbnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

void save_model(const PbnModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file " + path.string());
  out << serialize_model(model);
  if (!out) throw Error("failed writing model file " + path.string());
}

std::string model_hash(const PbnModel& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : serialize_model(model)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pbnssa
