#include "budget_lp.hpp"

#include <algorithm>
#include <cmath>

#include "pml/errors.hpp"

namespace pml::detail {

namespace {
constexpr int kRefactorEvery = 50;
constexpr int kMaxPivots = 100000;
}  // namespace

BudgetLp::BudgetLp(const FeasibleSetSpec& spec) : spec_(&spec) {
  const int d = spec.dims;
  active_ = spec.active_columns();
  eq_of_col_.assign(static_cast<std::size_t>(spec.cols()), -1);
  for (std::size_t e = 0; e < active_.size(); ++e) eq_of_col_[static_cast<std::size_t>(active_[e])] = static_cast<int>(e);
  const int a = static_cast<int>(active_.size());
  m_ = a + d;

  int start_row = -1;
  double start_size = 0.0;
  for (int i = 0; i < spec.rows(); ++i) {
    double s = 0.0;
    bool usable = true;
    for (int k = 0; k < d; ++k) {
      if (!(spec.level_values(i, k) > 0.0)) usable = false;
      s += spec.level_values(i, k);
    }
    if (!usable) continue;
    vars_.push_back({i, 0});
    for (int j : active_) vars_.push_back({i, j});
    if (start_row < 0 || s < start_size) {
      start_row = i;
      start_size = s;
    }
  }
  for (int k = 0; k < d; ++k) vars_.push_back({-1, k});
  if (start_row < 0) throw Infeasible("no usable probability level");

  rhs_.resize(m_);
  for (int e = 0; e < a; ++e) rhs_(e) = spec.targets(active_[static_cast<std::size_t>(e)]);
  for (int k = 0; k < d; ++k) rhs_(a + k) = 1.0;

  // Start with every column on the smallest level and the slacks basic.
  in_basis_.assign(vars_.size(), 0);
  basis_.assign(static_cast<std::size_t>(m_), -1);
  for (std::size_t v = 0; v < vars_.size(); ++v) {
    const Var& var = vars_[v];
    if (var.row == start_row && var.col != 0) basis_[static_cast<std::size_t>(eq_of_col_[static_cast<std::size_t>(var.col)])] = static_cast<int>(v);
    if (var.row == -1) basis_[static_cast<std::size_t>(a + var.col)] = static_cast<int>(v);
  }
  for (int b : basis_) in_basis_[static_cast<std::size_t>(b)] = 1;
  refactor();
  const Eigen::VectorXd x = binv_ * rhs_;
  if (x.minCoeff() < -1e-12) throw Infeasible("profile mass does not fit the budget even at the smallest level");
}

void BudgetLp::column_of(const Var& v, Eigen::VectorXd& col) const {
  const int a = static_cast<int>(active_.size());
  col.setZero(m_);
  if (v.row < 0) {
    col(a + v.col) = 1.0;
    return;
  }
  if (v.col != 0) col(eq_of_col_[static_cast<std::size_t>(v.col)]) = 1.0;
  for (int k = 0; k < spec_->dims; ++k) col(a + k) = spec_->level_values(v.row, k);
}

void BudgetLp::refactor() {
  Eigen::MatrixXd B(m_, m_);
  Eigen::VectorXd col;
  for (int r = 0; r < m_; ++r) {
    column_of(vars_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])], col);
    B.col(r) = col;
  }
  binv_ = B.partialPivLu().inverse();
  pivots_since_refactor_ = 0;
}

BudgetLp::Solution BudgetLp::solve(const AssignmentMatrix& G) {
  const int a = static_cast<int>(active_.size());
  const int d = spec_->dims;
  auto cost = [&](const Var& v) { return v.row < 0 ? 0.0 : G(v.row, v.col); };

  double scale = 1.0;
  for (const Var& v : vars_) scale = std::max(scale, std::abs(cost(v)));
  const double tol = 1e-12 * scale;

  Eigen::VectorXd cb(m_), y(m_), x(m_), u(m_), col;
  int degenerate_streak = 0;
  for (int pivot = 0;; ++pivot) {
    if (pivot > kMaxPivots) throw std::runtime_error("budget LP failed to converge");
    for (int r = 0; r < m_; ++r) cb(r) = cost(vars_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])]);
    y = binv_.transpose() * cb;
    x = binv_ * rhs_;

    // Dantzig pricing; Bland's rule once pivots stop making progress.
    const bool bland = degenerate_streak > 2 * m_;
    int enter = -1;
    double best = tol;
    for (std::size_t q = 0; q < vars_.size(); ++q) {
      if (in_basis_[q]) continue;
      const Var& v = vars_[q];
      double rc;
      if (v.row < 0) {
        rc = -y(a + v.col);
      } else {
        rc = cost(v);
        if (v.col != 0) rc -= y(eq_of_col_[static_cast<std::size_t>(v.col)]);
        for (int k = 0; k < d; ++k) rc -= spec_->level_values(v.row, k) * y(a + k);
      }
      if (rc > best) {
        enter = static_cast<int>(q);
        best = rc;
        if (bland) break;
      }
    }
    if (enter < 0) break;

    column_of(vars_[static_cast<std::size_t>(enter)], col);
    u = binv_ * col;
    int leave = -1;
    double ratio = 0.0;
    for (int r = 0; r < m_; ++r) {
      if (u(r) <= 1e-12) continue;
      const double t = std::max(x(r), 0.0) / u(r);
      if (leave < 0 || t < ratio - 1e-15 ||
          (t <= ratio + 1e-15 && basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
        leave = r;
        ratio = t;
      }
    }
    if (leave < 0) throw std::runtime_error("budget LP is unbounded");
    degenerate_streak = ratio <= 1e-15 ? degenerate_streak + 1 : 0;

    const double pv = u(leave);
    binv_.row(leave) /= pv;
    for (int r = 0; r < m_; ++r)
      if (r != leave && u(r) != 0.0) binv_.row(r) -= u(r) * binv_.row(leave);
    in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave)])] = 0;
    basis_[static_cast<std::size_t>(leave)] = enter;
    in_basis_[static_cast<std::size_t>(enter)] = 1;
    if (++pivots_since_refactor_ >= kRefactorEvery) refactor();
  }

  Solution sol;
  sol.S = AssignmentMatrix::Zero(spec_->rows(), spec_->cols());
  for (int r = 0; r < m_; ++r) {
    const Var& v = vars_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
    if (v.row < 0) continue;
    const double val = std::max(x(r), 0.0);
    sol.S(v.row, v.col) = val;
    sol.value += cost(v) * val;
  }
  sol.upper_bound = y.dot(rhs_);
  sol.column_duals.assign(static_cast<std::size_t>(spec_->cols()), 0.0);
  for (int e = 0; e < a; ++e) sol.column_duals[static_cast<std::size_t>(active_[static_cast<std::size_t>(e)])] = y(e);
  for (int k = 0; k < d; ++k) sol.budget_duals.push_back(y(a + k));
  return sol;
}

}  // namespace pml::detail
