#pragma once

#include <stdexcept>
#include <string>

namespace ruinlab {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Utility evaluated where it is -infinity (for example log at zero).
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A configuration value violates an invariant of the type being built.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A model constraint (ordering of consumption, floor, discount) is violated.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

// A bound was requested outside the regime where it applies (B <= Y).
class InapplicableError : public Error {
 public:
  using Error::Error;
};

// The Hoeffding horizon is at or below 2 a0 / (B - Y).
class ThresholdError : public Error {
 public:
  ThresholdError(const std::string& what, double t_min) : Error(what), t_min_(t_min) {}
  double t_min() const noexcept { return t_min_; }

 private:
  double t_min_;
};

// Value iteration stopped at max_iterations with residual above tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, long iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

// A brute-force search would exceed its evaluation budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ruinlab
