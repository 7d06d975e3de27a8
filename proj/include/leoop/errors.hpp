#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace leoop {

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Bad or inconsistent scenario/experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A numerical method failed to reach its target. Carries the best value
// it had when it gave up, if any.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what,
                        double best_estimate = std::numeric_limits<double>::quiet_NaN(),
                        double error_bound = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), best_(best_estimate), bound_(error_bound) {}

  double best_estimate() const noexcept { return best_; }
  double error_bound() const noexcept { return bound_; }

 private:
  double best_;
  double bound_;
};

}  // namespace leoop
