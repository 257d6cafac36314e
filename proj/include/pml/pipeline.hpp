#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pml/estimators.hpp"
#include "pml/solver.hpp"

namespace pml {

// Every term of the explicit slack sum between the brute-force PML value and
// the certified lower bound on the output's profile probability.
struct SlackTerms {
  double min_probability = 0.0;             // elements below the probability grid
  double probability_discretization = 0.0;  // sum_k eps(k) n(k)
  double profile_discretization = 0.0;      // both directions of the profile ceiling
  double log_k_bound = 0.0;                 // log of an upper bound on |K_{phi'}|
  double stirling_upper = 0.0;              // log_w - log_g over all of K_{phi'}
  double solver_gap = 0.0;                  // certified optimality gap of the fractional solution
  double rounding = 0.0;                    // max(a-priori bound, actual loss) in log_g
  double stirling_lower = 0.0;              // log_g - log_w of the rounded matrix

  double total() const;
};

struct PmlDiagnostics {
  int dims = 1;
  std::vector<std::int64_t> n;
  std::vector<std::int64_t> n_prime;
  std::vector<double> eps;    // probability grid parameter per coordinate
  std::vector<double> gamma;  // frequency grid parameter per coordinate
  int base_rows = 0;
  int columns = 0;  // including the unseen column
  int active_columns = 0;

  double log_c_phi_prime = 0.0;
  double log_g_fractional = 0.0;
  double log_g_rounded = 0.0;
  double log_w_rounded = 0.0;
  double rounding_loss = 0.0;
  double rounding_bound = 0.0;
  double solver_delta = 0.0;
  double certified_gap = 0.0;
  bool certified = false;
  int iterations = 0;
  std::vector<double> pseudo_mass;  // per coordinate, before normalization

  SlackTerms slack;
  double delta_total = 0.0;
  // log C_{phi'} + log w(X_rounded) - (phi' -> phi slack): certified lower bound
  // on the log profile probability of the returned distribution.
  double logprob_lower_bound = 0.0;
};

struct PmlResult {
  LevelSetDistribution distribution;
  LevelSetDistribution pseudo;
  PmlDiagnostics diagnostics;
};

struct PmlOptions {
  std::optional<double> delta;  // solver tolerance; defaults to SolverConfig::defaults
  std::optional<int> max_iters;
};

// Grids, discretized profile, fractional solve, rounding, normalization.
// eps1, eps2 in (0, 1].
PmlResult approximate_pml(const Profile& phi, double eps1, double eps2, const PmlOptions& opts = {});

// n^{-1/3}, the default for both grid parameters.
double default_eps(std::int64_t n);

}  // namespace pml
