#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pml/exact_oracle.hpp"
#include "pml/pipeline.hpp"

namespace pml {

inline constexpr int kMaxDims = 3;

// Joint frequency-tuple histogram of d sequences over a common domain.
struct DProfile {
  int d = 0;
  std::map<std::vector<std::int64_t>, std::int64_t> entries;  // nonzero tuple -> count
  std::vector<std::int64_t> n;                                // per-coordinate lengths

  // Validates tuples (length d, nonnegative, not all zero) and recomputes n.
  static DProfile from_entries(int d, std::map<std::vector<std::int64_t>, std::int64_t> entries);
  std::vector<FrequencyClass> classes() const;
  std::int64_t distinct() const;
  // The one-coordinate case as an ordinary profile.
  Profile to_profile() const;
};

// Symbols are compared by token across sequences.
DProfile d_profile_of(const std::vector<std::vector<std::string>>& seqs);
DProfile d_profile_of_chars(const std::vector<std::string>& seqs);

// Per-coordinate probability ladders and frequency grids; the product of the
// ladders gives the d-tuple probability levels. Each ladder reaches below
// 1/(2 max(n(k), distinct)^2): elements seen only in other coordinates still
// need a level here, and the floor must leave room for all of them.
struct DGrids {
  std::vector<ProbabilityGrid> plevel;
  std::vector<FrequencyGrid> mlevel;

  static DGrids build(const std::vector<std::int64_t>& n, const std::vector<double>& eps,
                      const std::vector<double>& gamma, std::int64_t distinct = 0);
  int rows() const;
  // Probability tuple of product row i (coordinate 0 most significant).
  std::vector<double> level(int i) const;
};

// Ceils every nonzero coordinate onto its frequency grid.
DProfile discretize_d_profile(const DProfile& dp, const DGrids& grids);

// Product feasible set. With one coordinate every grid frequency gets a column
// (the 1-d layout); otherwise only tuples that occur in dp_prime do, since the
// product of frequency grids is large and empty columns hold nothing.
FeasibleSetSpec product_spec(const DProfile& dp_prime, const DGrids& grids);

// n(k)^{-1/(2d+1)}.
std::vector<double> default_eps_d(const DProfile& dp);

struct PmlResultD {
  TupleLevelSetDistribution distribution;
  TupleLevelSetDistribution pseudo;
  PmlDiagnostics diagnostics;
};

PmlResultD approximate_pml_d(const DProfile& dp, const std::vector<double>& eps, const std::vector<double>& gamma,
                             const PmlOptions& opts = {});

inline constexpr std::int64_t kDOracleMaxN = 6;
inline constexpr std::size_t kDOracleMaxSupport = 5;

// Sum over d-types with the given d-profile; p holds one distribution per
// coordinate on a shared domain. Guarded by n(k) <= 6 and support <= 5.
LogProb exact_d_profile_logprob(const std::vector<DenseDistribution>& p, const DProfile& dp);

// Exact profile probability of a level-set distribution (grouped evaluation).
LogProb d_profile_logprob_of(const TupleLevelSetDistribution& p, const DProfile& dp);

struct BruteForceResultD {
  std::vector<DenseDistribution> distribution;
  LogProb logprob;
};

// Grid search: coordinate 0 nonincreasing, other coordinates any composition,
// all in multiples of 1/resolution on `support` elements. A lower bound on the
// d-dimensional PML value.
BruteForceResultD brute_force_pml_d(const DProfile& dp, int support, int resolution);

}  // namespace pml
