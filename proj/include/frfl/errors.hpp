#pragma once

#include <stdexcept>
#include <string>

namespace frfl {

/// Invalid user-supplied parameters (bad dimension, exponent out of range, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A well-formed computation that cannot proceed on the given data.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Explicit step rejected by the CFL guard.
class CflViolation : public DomainError {
 public:
  CflViolation(const std::string& what, double suggested_dt)
      : DomainError(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// Density 1 + sigma dropped to zero or below.
class DensityError : public DomainError {
 public:
  using DomainError::DomainError;
};

class GridMismatch : public std::invalid_argument {
 public:
  GridMismatch() : std::invalid_argument("fields live on different grids") {}
};

}  // namespace frfl
