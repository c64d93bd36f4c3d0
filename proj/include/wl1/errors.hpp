#pragma once

#include <stdexcept>
#include <string>

namespace wl1 {

/// Invalid argument: wrong length, out-of-range index, bad parameter value.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A formula evaluated outside its domain (e.g. constants that diverge).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by the sharpness construction for geometries it does not cover.
class UnsupportedGeometry : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Exhaustive enumeration would exceed the configured support budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wl1
