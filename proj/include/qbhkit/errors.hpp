#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qbhkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position()` is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Evaluation outside the real domain of an expression or chart guard.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operands live on different coordinate charts.
class ChartMismatch : public Error {
 public:
  using Error::Error;
};

/// An opaque symbol or parameter has no numeric interpretation.
class MissingBinding : public Error {
 public:
  using Error::Error;
};

/// The sampler could not find admissible points inside the chart domain.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A structure coefficient required by an operation was not supplied.
class MissingCoefficient : public Error {
 public:
  using Error::Error;
};

/// A structure-definition file is inconsistent (unresolved reference etc.).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace qbhkit
