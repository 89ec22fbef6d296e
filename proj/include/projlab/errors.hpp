#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace projlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (d > q, column-count mismatch, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A Gram matrix is numerically rank deficient.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Malformed numeric input; row and column are 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what), row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// An invalid experiment configuration; field() names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// The combined support of a D_BL problem exceeds the configured cap.
class SupportSizeError : public Error {
 public:
  using Error::Error;
};

/// The LP solver failed or could not certify its optimum.
class LpError : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization failed even at the largest jitter.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

/// A source has no analytic projected law and no plug-in reference was given.
class MissingReferenceError : public Error {
 public:
  using Error::Error;
};

/// The mixing measure violates a precondition of the limit theorems
/// (atom at zero, so the halfspace class fails the continuity condition C3).
class ConditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace projlab
