#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fraks {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller violated an API precondition (mismatched grids, short history, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A time integrator could not complete a step.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::size_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// A fixed-point iteration did not reach its tolerance.
class IterationError : public std::runtime_error {
 public:
  IterationError(const std::string& what, std::vector<double> differences)
      : std::runtime_error(what), differences_(std::move(differences)) {}
  const std::vector<double>& differences() const noexcept { return differences_; }

 private:
  std::vector<double> differences_;
};

// Malformed binary or text artifact.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fraks
