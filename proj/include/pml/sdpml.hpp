#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pml/discretization.hpp"

namespace pml {

// Rows are probability levels, column 0 counts unseen elements and column j
// counts elements whose discretized frequency is the j-th frequency level.
using AssignmentMatrix = Eigen::MatrixXd;

enum class SetVariant { kIntegral, kFractional, kQRestricted, kExtended };

// Feasible set of assignment matrices. Levels and frequencies are d-tuples
// (one coordinate per sample sequence); the one-sequence case is d = 1.
struct FeasibleSetSpec {
  SetVariant variant = SetVariant::kFractional;
  int dims = 1;
  int base_rows = 0;
  Eigen::MatrixXd level_values;  // rows x dims; 0 marks an unused appended level
  Eigen::MatrixXd level_logs;    // rows x dims
  Eigen::MatrixXd freqs;         // cols x dims; row 0 is the all-zero unseen column
  Eigen::VectorXd targets;       // required column sums; targets(0) is unused
  Eigen::VectorXd row_totals;    // q-restricted only
  Eigen::MatrixXd coef;          // coef(i,j) = sum_k freqs(j,k) log level(i,k)
  // Per-coordinate ladder sizes when the base rows form a product of ladders
  // (row index in mixed radix, coordinate 0 most significant, each ladder
  // ascending). Empty for arbitrary level sets with dims > 1.
  std::vector<int> ladder;

  int rows() const { return static_cast<int>(level_values.rows()); }
  int cols() const { return static_cast<int>(freqs.rows()); }
  // sum_j targets(j) * freqs(j,k)
  double length(int k) const;
  // Columns with a positive target, in increasing order.
  std::vector<int> active_columns() const;

  static FeasibleSetSpec make(const Eigen::MatrixXd& level_values, const Eigen::MatrixXd& freqs,
                              const Eigen::VectorXd& targets, SetVariant variant);
  static FeasibleSetSpec from_grids(const DiscreteProfile& phi_prime, const ProbabilityGrid& pgrid,
                                    SetVariant variant = SetVariant::kFractional);

  // K_{q,phi'}: row sums pinned to the level counts of a pseudo-distribution.
  FeasibleSetSpec restricted_to(const Eigen::VectorXd& totals) const;
  // Appends one level per frequency column (extra_levels is (cols-1) x dims).
  FeasibleSetSpec extended_with(const Eigen::MatrixXd& extra_levels) const;
};

bool is_feasible(const AssignmentMatrix& X, const FeasibleSetSpec& spec, double tol);

// Budget used in coordinate k: sum_i level(i,k) * (X1)_i.
double budget(const AssignmentMatrix& X, const FeasibleSetSpec& spec, int k);

// log of prod_i level_i^{(Xm)_i} (X1)_i! / prod_j X_ij!  for integral X.
double log_w_sdpml(const AssignmentMatrix& X, const FeasibleSetSpec& spec);

// Continuous relaxation: sum (Xm) log level + sum R log R - sum X log X.
double log_g(const AssignmentMatrix& X, const FeasibleSetSpec& spec);

inline constexpr double kGradClamp = 1e-12;

AssignmentMatrix grad_log_g(const AssignmentMatrix& X, const FeasibleSetSpec& spec, double eta = kGradClamp);

// Bounds on log_w - log_g from 1 <= k!/e^{k log k - k} <= e sqrt(k+1).
struct StirlingBounds {
  double lower = 0.0;  // summed over entries of nonzero rows
  double upper = 0.0;  // summed over all rows
};
StirlingBounds stirling_bounds(const AssignmentMatrix& X, const FeasibleSetSpec& spec);

struct EnumerationOptions {
  std::size_t cap = 1'000'000;
  std::optional<std::int64_t> unseen_cap;  // per-entry cap on column 0
};

// Visits every integral feasible matrix exactly once; throws GuardExceeded
// once more than opts.cap matrices have been produced.
void for_each_integral_K(const FeasibleSetSpec& spec, const EnumerationOptions& opts,
                         const std::function<void(const AssignmentMatrix&)>& visit);
std::vector<AssignmentMatrix> enumerate_integral_K(const FeasibleSetSpec& spec, const EnumerationOptions& opts);

// log C_{phi'} computed from the column targets.
double log_c_targets(const FeasibleSetSpec& spec);

// log C_{phi'} + log sum_{X in K_{q,phi'}} w(X).
double log_dpml_sum(const DiscretePseudoDistribution& q, const DiscreteProfile& phi_prime,
                    const FeasibleSetSpec& spec, std::size_t cap = 1'000'000);

}  // namespace pml
