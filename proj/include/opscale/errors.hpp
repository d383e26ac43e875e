#pragma once

#include <stdexcept>
#include <string>

namespace opscale {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& what) : Error(what) {}
};

// Thrown by exact inversion; carries the column of the certifying zero pivot.
struct SingularMatrixError : Error {
  int pivot_index;
  SingularMatrixError(const std::string& what, int pivot)
      : Error(what), pivot_index(pivot) {}
};

struct ParseError : Error {
  std::size_t position;
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

// Malformed JSON document structure (wrong fields, shapes, or value types).
struct SchemaError : Error {
  explicit SchemaError(const std::string& what) : Error(what) {}
};

// Raised when a capped/certified scaling run can no longer continue at the
// configured precision. Message carries advice (raise bits / use exact mode).
struct PrecisionExhausted : Error {
  explicit PrecisionExhausted(const std::string& what) : Error(what) {}
};

// A rational formula whose pencil is not full is undefined at every matrix
// substitution; RIT surfaces this as a distinct outcome rather than a verdict.
struct EmptyDomainError : Error {
  explicit EmptyDomainError(const std::string& what) : Error(what) {}
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& what) : Error(what) {}
};

}  // namespace opscale
