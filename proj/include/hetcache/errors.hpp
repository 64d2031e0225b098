#pragma once

#include <stdexcept>
#include <string>

namespace hetcache {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Configuration rejected by the schema or by a cross-field invariant.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, std::string reason)
      : std::runtime_error(field + ": " + reason),
        field_(std::move(field)),
        reason_(std::move(reason)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

/// Quadrature that failed to reach its tolerance within the subdivision budget.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}

  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

/// Caching efficiency requested for a network whose cost per area is zero.
class UndefinedEfficiencyError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace hetcache
