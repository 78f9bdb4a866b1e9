#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

/// Precondition or configuration violation. Raised before any computation.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a map or recursion (e.g. non-positive XY point).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to deliver its contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationStalled : public NumericalError {
 public:
  IntegrationStalled(const std::string& what, double last_time)
      : NumericalError(what), last_time_(last_time) {}
  double last_time() const noexcept { return last_time_; }

 private:
  double last_time_;
};

class ContractionViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoIntersection : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PlateauError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace dyadic
