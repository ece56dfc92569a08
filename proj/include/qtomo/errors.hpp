#pragma once

#include <stdexcept>
#include <string>

namespace qtomo {

/// Raised when an input violates a mathematical or schema contract.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of incompatible shape.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qtomo
