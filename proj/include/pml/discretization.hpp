#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pml/exact_oracle.hpp"
#include "pml/profile.hpp"

namespace pml {

// Geometric ladder (1+eps)^{-t}, t = b1-1 .. 0, stored by exponent. Index 0
// is the smallest value, index b1-1 is 1.
class ProbabilityGrid {
 public:
  ProbabilityGrid() = default;
  // Minimal b1 with (1+eps)^{1-b1} <= 1/(2n^2). eps in (0, 1].
  static ProbabilityGrid build(std::int64_t n, double eps);
  // Rebuilds from serialized exponents (all values (1+eps)^{e}, e <= 0).
  static ProbabilityGrid from_exponents(double eps, std::int64_t depth);

  double eps() const { return eps_; }
  int size() const { return b1_; }
  // Exponent e_i <= 0 with value(i) = (1+eps)^{e_i}.
  int exponent(int i) const { return i - (b1_ - 1); }
  double log_value(int i) const { return static_cast<double>(exponent(i)) * log_base_; }
  double value(int i) const { return std::exp(log_value(i)); }
  std::vector<int> exponents() const;

  // Index of the largest grid value <= c, or nullopt when c is below the grid.
  std::optional<int> floor_index(double c) const;

 private:
  double eps_ = 0.0;
  double log_base_ = 0.0;
  int b1_ = 0;
};

class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  // {1..ceil(1/eps)} u {ceil((1+eps/2)^k)} u {n}, capped at n. eps in (0, 1].
  static FrequencyGrid build(std::int64_t n, double eps);

  double eps() const { return eps_; }
  std::int64_t n() const { return n_; }
  int size() const { return static_cast<int>(values_.size()); }
  const std::vector<std::int64_t>& values() const { return values_; }
  std::int64_t value(int j) const { return values_[static_cast<std::size_t>(j)]; }
  // Index of the smallest grid value >= f.
  int ceil_index(std::int64_t f) const;

 private:
  double eps_ = 0.0;
  std::int64_t n_ = 0;
  std::vector<std::int64_t> values_;
};

struct DiscretePseudoDistribution {
  ProbabilityGrid grid;
  std::map<int, std::int64_t> level_counts;  // grid index -> count
  double dropped_mass = 0.0;                 // mass of entries below the grid floor

  double mass() const;
  DenseDistribution to_dense() const;
};

struct DiscreteProfile {
  FrequencyGrid grid;
  std::vector<std::int64_t> counts;  // counts[j] elements with discretized frequency grid.value(j)
  std::int64_t n_prime = 0;

  // The discretized profile as an ordinary profile of length n'.
  Profile to_profile() const;
};

// Entrywise floor onto the grid. Accepts pseudo-distributions.
DiscretePseudoDistribution disc(const DenseDistribution& p, const ProbabilityGrid& grid);

DiscreteProfile discretize_profile(const Profile& phi, const FrequencyGrid& grid);

}  // namespace pml
