#pragma once

#include <stdexcept>
#include <string>

namespace fuzzyflow {

/// Caller passed operands that cannot be combined (dimension mismatch, bad flag).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Torus parameters that violate the construction gates (coprimality, n >= 2).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An input matrix failed a type invariant (Hermiticity, exp(2 pi i x / n) = u, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Function evaluated outside its domain; carries the offending smallest eigenvalue.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, double lambda_min)
      : std::domain_error(what), lambda_min_(lambda_min) {}
  double lambda_min() const noexcept { return lambda_min_; }

 private:
  double lambda_min_;
};

/// Iterative method failed to converge; carries the final residual.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace fuzzyflow
