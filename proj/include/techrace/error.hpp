#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace techrace {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A single offending input field, used to build field-level diagnostics.
struct FieldIssue {
  std::string field;
  std::string message;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<FieldIssue> issues);
  ValidationError(std::string field, std::string message);

  const std::vector<FieldIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<FieldIssue> issues_;
};

// Unknown name (preset, parameter, regime...). Carries the accepted names.
class LookupError : public Error {
 public:
  LookupError(std::string what_kind, std::string name,
              std::vector<std::string> valid);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& valid_names() const noexcept {
    return valid_;
  }

 private:
  std::string name_;
  std::vector<std::string> valid_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Numerical failure that cannot happen for valid inputs (non-finite
// integrand, quadrature that does not reach tolerance).
class ComputationFault : public Error {
 public:
  using Error::Error;
};

class UndefinedElasticity : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace techrace
