#pragma once

#include <stdexcept>
#include <string>

namespace wetting {

/// Rejected input parameter (dimension out of range, negative epsilon, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was called in a context it does not support.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A state invariant (hard wall, pinned mask) was found broken.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure that should be impossible for valid input.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact computation refused: estimated error above target or system too large.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wetting
