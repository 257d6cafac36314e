#pragma once

#include <vector>

#include "pml/sdpml.hpp"

namespace pml {

struct SolverConfig {
  double delta = 1e-6;
  int max_iters = 200000;
  double lmo_tol = 1e-10;

  // delta = 1e-6 * n' log n' (at least 1e-6), summed over coordinates.
  static SolverConfig defaults(const FeasibleSetSpec& spec);
};

struct SolveResult {
  AssignmentMatrix X;
  double objective = 0.0;
  double certified_gap = 0.0;
  int iterations = 0;
  bool certified = false;
};

struct LmoResult {
  AssignmentMatrix S;
  double value = 0.0;        // <G, S>
  double upper_bound = 0.0;  // dual bound on max over the polytope of <G, .>
  double multiplier = 0.0;   // budget multiplier (single-budget case)
  std::vector<double> column_duals;
};

// Linear maximization over the fractional set with a single budget row, by
// bisection on the budget multiplier. At most one column is split between
// two rows (the one whose move makes the budget bind).
LmoResult lmo(const AssignmentMatrix& G, const FeasibleSetSpec& spec, double tol = 1e-10);

// Each column on the level nearest to m_j / n', shifted down the ladder until
// the budget holds, blending two shifts so the budget is met with equality.
AssignmentMatrix initial_point(const FeasibleSetSpec& spec);

// Frank-Wolfe ascent on log g over the fractional set.
SolveResult maximize_g(const FeasibleSetSpec& spec, const SolverConfig& cfg);

}  // namespace pml
