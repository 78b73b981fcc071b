#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rnorm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Block shapes do not match the operator they are applied to.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or otherwise invalid numeric input.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid widths, budgets, index pairs or configuration.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Numerically singular triangular factor, or a rank-deficient input where
/// full column rank is required.
class FactorError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated input file. `line()` is 0 when the problem is not
/// tied to a line (binary payloads).
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rnorm
