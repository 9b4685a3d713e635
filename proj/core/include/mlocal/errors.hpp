#pragma once

#include <stdexcept>
#include <string>

namespace mlocal {

/// Raised when n, m, k' or a visibility fall outside their admissible range.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when objects describing different party counts are combined.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a bisection has no sign change to look for.
class NoViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mlocal
