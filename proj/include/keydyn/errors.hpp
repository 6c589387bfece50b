#pragma once

#include <stdexcept>
#include <string>

namespace keydyn {

/// A key that has no coordinate in the keyboard geometry, or cannot be parsed.
class InvalidKey : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Session or feature file that does not follow the expected schema.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& what, std::size_t row)
      : std::runtime_error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Press without release (or the reverse) in an event stream.
class PairingError : public std::runtime_error {
 public:
  PairingError(const std::string& what, double timestamp_ms)
      : std::runtime_error(what), timestamp_ms_(timestamp_ms) {}
  double timestamp_ms() const noexcept { return timestamp_ms_; }

 private:
  double timestamp_ms_;
};

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace keydyn
