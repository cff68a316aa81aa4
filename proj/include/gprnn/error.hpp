#pragma once

#include <stdexcept>
#include <string>

namespace gprnn {

// Failure categories; the CLI maps them onto exit statuses.
enum class ErrorKind { Config, Data, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Invalid parameters or flag values.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

// Factorization failures, degenerate coordinates and similar.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

// A redundant coordinate with (near) zero spread over the training set.
class DegenerateCoordinateError : public NumericalError {
 public:
  DegenerateCoordinateError(std::size_t row, const std::string& what)
      : NumericalError(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace gprnn
