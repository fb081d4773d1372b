#pragma once

#include <stdexcept>
#include <string>

namespace ddstab {

/// Raised when an operation is called on inputs that break its stated preconditions.
class PreconditionViolated : public std::logic_error {
 public:
  explicit PreconditionViolated(const std::string& what) : std::logic_error(what) {}
};

/// Raised when vectors or matrices that must agree in shape do not.
class DimensionMismatch : public std::invalid_argument {
 public:
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed trajectory, gain or config file. The message names the offending field or row.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ddstab
