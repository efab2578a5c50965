#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pbnssa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed model or property text. `location` names the offending line or field.
class ParseError : public Error {
 public:
  ParseError(std::string location, const std::string& message)
      : Error(location.empty() ? message : location + ": " + message),
        location_(std::move(location)) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

/// Input for which a statistic or formula is undefined (zero variance,
/// a meta state that was never visited, alpha + beta = 0, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A loop that exceeded its step cap. Carries the R-hat values observed so far
/// when raised by the multi-chain convergence check.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& message, std::vector<double> trace = {})
      : Error(message), trace_(std::move(trace)) {}

  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace pbnssa
