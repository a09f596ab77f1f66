#pragma once

#include <stdexcept>
#include <string>

namespace rdpq {

/// Argument outside the mathematical domain of an operation (negative Bessel
/// argument, point outside the kernel triangle, non-positive zoom).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Plant parameters that make a construction undefined, e.g. a resonant
/// reaction coefficient lambda = n^2 pi^2.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent discretization or configuration (grid mismatch, delay not
/// aligned with the time step, unknown config key).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A design-constant selection with no admissible solution.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rdpq
