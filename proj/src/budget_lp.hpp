#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pml/sdpml.hpp"

namespace pml::detail {

// Revised simplex for the linear maximization oracle when there are several
// budget rows:
//   max <G, S>  s.t.  column sums of S equal the targets (j >= 1),
//                     sum_i level(i,k) (S1)_i <= 1 for every coordinate k,
//                     S >= 0.
// The basis survives between calls (only the objective changes), so
// consecutive Frank-Wolfe iterations warm start.
class BudgetLp {
 public:
  explicit BudgetLp(const FeasibleSetSpec& spec);

  struct Solution {
    AssignmentMatrix S;
    double value = 0.0;
    double upper_bound = 0.0;
    std::vector<double> column_duals;  // indexed by column, 0 for column 0
    std::vector<double> budget_duals;  // one per coordinate
  };

  Solution solve(const AssignmentMatrix& G);

 private:
  struct Var {
    int row = -1;    // -1 for a budget slack
    int col = 0;     // slack index when row == -1
  };

  void column_of(const Var& v, Eigen::VectorXd& a) const;
  void refactor();

  const FeasibleSetSpec* spec_;
  std::vector<int> active_;       // active columns
  std::vector<int> eq_of_col_;    // column -> equality row, -1 if inactive
  std::vector<Var> vars_;
  std::vector<int> basis_;        // indices into vars_
  std::vector<char> in_basis_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd rhs_;
  int m_ = 0;
  int pivots_since_refactor_ = 0;
};

}  // namespace pml::detail
