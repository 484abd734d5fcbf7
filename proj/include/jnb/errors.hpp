#pragma once

#include <stdexcept>

namespace jnb {

/// A point or parameter lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The supremum is +inf: no function in the BMO ball attains a finite value.
class UnattainableError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// exp|phi| is not integrable for the requested function.
class IntegrabilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a geometric guarantee (coverage, tangent existence) fails.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace jnb
