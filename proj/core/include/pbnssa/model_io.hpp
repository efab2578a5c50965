#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pbnssa/model.hpp"

namespace pbnssa {

/// Format tag written to and required in every model file.
inline constexpr std::string_view kModelFormat = "pbn-1";

/// Parses a "pbn-1" JSON model document:
///
///   {"format": "pbn-1", "n": 2, "perturbation": 0.01,
///    "nodes": [[{"parents": [1], "table": "2", "prob": 1.0}], ...],
///    "names": ["a", "b"]}
///
/// `table` is a hex number whose bit e is the function value for table index e
/// (so the least significant bit is the all-parents-zero entry); it has exactly
/// ceil(2^|parents| / 4) digits. Throws ParseError naming the field on syntax
/// errors and on any model invariant violation.
PbnModel parse_model(std::string_view text);

/// Inverse of parse_model. Probabilities are written with round-trip precision.
std::string serialize_model(const PbnModel& model);

PbnModel load_model(const std::filesystem::path& path);
void save_model(const PbnModel& model, const std::filesystem::path& path);

/// Hex encoding of a truth table as used in the model format.
std::string table_to_hex(const BitVector& table);
/// Decodes `hex` into a table of `entries` bits. Throws ParseError on bad digits,
/// wrong digit count, or bits set above `entries`.
BitVector table_from_hex(std::string_view hex, std::size_t entries);

/// FNV-1a 64-bit hash of the serialised model, as 16 hex digits.
std::string model_hash(const PbnModel& model);

}  // namespace pbnssa
