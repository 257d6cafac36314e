#pragma once

#include <stdexcept>
#include <string>

namespace pml {

// Malformed or out-of-range input (bad profile, bad parameters, shape mismatch).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An exact enumeration would exceed its size guard.
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The feasible set is empty for the given grids and discrete profile.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mathematically undefined quantity (zero mass, infinite divergence, k < support).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace pml
