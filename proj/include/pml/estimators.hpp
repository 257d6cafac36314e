#pragma once

#include <cstdint>
#include <vector>

#include "pml/rounding.hpp"

namespace pml {

// A (pseudo-)distribution as level sets: `count` elements of probability `value`.
struct Level {
  double value = 0.0;
  std::int64_t count = 0;
  bool operator==(const Level&) const = default;
};

struct LevelSetDistribution {
  std::vector<Level> levels;  // distinct values, descending

  double total_mass() const;
  std::int64_t elements() const;
  // Merges equal values, drops empty levels and sorts by value descending.
  static LevelSetDistribution from_levels(std::vector<Level> levels);
  bool operator==(const LevelSetDistribution&) const = default;
};

// Level sets over d coordinates (d independent distributions on a shared
// domain): each element carries one probability per coordinate.
struct TupleLevel {
  std::vector<double> values;
  std::int64_t count = 0;
  bool operator==(const TupleLevel&) const = default;
};

struct TupleLevelSetDistribution {
  int dims = 0;
  std::vector<TupleLevel> levels;  // distinct tuples, lexicographically descending

  double total_mass(int k) const;
  std::int64_t elements() const;
  static TupleLevelSetDistribution from_levels(int dims, std::vector<TupleLevel> levels);
  // Marginal of coordinate k (elements with probability 0 there are dropped).
  LevelSetDistribution coordinate(int k) const;
  bool operator==(const TupleLevelSetDistribution&) const = default;
};

using PairedLevelSetDistribution = TupleLevelSetDistribution;

// Level (value, (X1)_i) for every row of the rounded matrix with elements.
LevelSetDistribution pseudo_from_assignment(const RoundedSolution& r);
TupleLevelSetDistribution tuple_pseudo_from_assignment(const RoundedSolution& r);

LevelSetDistribution normalize(const LevelSetDistribution& q);
// Each coordinate divided by its own mass.
TupleLevelSetDistribution normalize(const TupleLevelSetDistribution& q);

// Plug-in estimates; the distribution must be normalized (within 1e-9).
double entropy(const LevelSetDistribution& p);
std::int64_t support_size(const LevelSetDistribution& p);
// Expected number of distinct elements seen in m draws.
double support_coverage(const LevelSetDistribution& p, std::int64_t m);
// L1 distance to the uniform distribution on k elements; k >= support.
double distance_to_uniformity(const LevelSetDistribution& p, std::int64_t k);
// sum count * v1 log(v1 / v2) for a two-coordinate distribution.
double kl_plugin(const TupleLevelSetDistribution& p);

}  // namespace pml
