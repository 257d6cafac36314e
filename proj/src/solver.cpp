#include "pml/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "budget_lp.hpp"
#include "pml/errors.hpp"

namespace pml {

namespace {

// Smallest positive double: the solver keeps iterates strictly positive, so
// this clamp only guards exact zeros.
constexpr double kTinyClamp = std::numeric_limits<double>::min();
// Weight of the dense component mixed into the starting point.
constexpr double kInteriorWeight = 1e-3;
// Cap on Frank-Wolfe steps so no entry of the iterate is ever zeroed.
constexpr double kMaxStep = 0.5;
constexpr int kMaxHalvings = 80;

bool usable(const FeasibleSetSpec& spec, int i) {
  for (int k = 0; k < spec.dims; ++k)
    if (!(spec.level_values(i, k) > 0.0)) return false;
  return true;
}

double inner(const AssignmentMatrix& A, const AssignmentMatrix& B) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      if (B(i, j) != 0.0) s += A(i, j) * B(i, j);
  return s;
}

// Keeps column 0 and the active columns only; every other column is forced to zero.
FeasibleSetSpec compact(const FeasibleSetSpec& spec, const std::vector<int>& active) {
  FeasibleSetSpec c = spec;
  const int a = static_cast<int>(active.size());
  c.freqs.resize(a + 1, spec.dims);
  c.targets.resize(a + 1);
  c.coef.resize(spec.rows(), a + 1);
  c.freqs.row(0) = spec.freqs.row(0);
  c.targets(0) = 0.0;
  c.coef.col(0) = spec.coef.col(0);
  for (int e = 0; e < a; ++e) {
    c.freqs.row(e + 1) = spec.freqs.row(active[static_cast<std::size_t>(e)]);
    c.targets(e + 1) = spec.targets(active[static_cast<std::size_t>(e)]);
    c.coef.col(e + 1) = spec.coef.col(active[static_cast<std::size_t>(e)]);
  }
  return c;
}

AssignmentMatrix expand(const AssignmentMatrix& Xc, const FeasibleSetSpec& spec, const std::vector<int>& active) {
  AssignmentMatrix X = AssignmentMatrix::Zero(spec.rows(), spec.cols());
  X.col(0) = Xc.col(0);
  for (std::size_t e = 0; e < active.size(); ++e) X.col(active[e]) = Xc.col(static_cast<Eigen::Index>(e + 1));
  return X;
}

// Per-coordinate view of the ladder: ascending values and the row stride.
struct Ladder {
  std::vector<double> values;
  std::vector<int> order;  // ladder position -> row offset contribution
};

std::vector<Ladder> ladders_of(const FeasibleSetSpec& spec) {
  std::vector<Ladder> out(static_cast<std::size_t>(spec.dims));
  if (spec.dims == 1) {
    std::vector<int> rows;
    for (int i = 0; i < spec.base_rows; ++i)
      if (usable(spec, i)) rows.push_back(i);
    std::stable_sort(rows.begin(), rows.end(),
                     [&](int a, int b) { return spec.level_values(a, 0) < spec.level_values(b, 0); });
    for (int i : rows) {
      out[0].values.push_back(spec.level_values(i, 0));
      out[0].order.push_back(i);
    }
    return out;
  }
  if (static_cast<int>(spec.ladder.size()) != spec.dims)
    throw InvalidInput("multidimensional starting point needs a product ladder");
  int stride = 1;
  for (int k = spec.dims - 1; k >= 0; --k) {
    const int b = spec.ladder[static_cast<std::size_t>(k)];
    for (int t = 0; t < b; ++t) {
      out[static_cast<std::size_t>(k)].values.push_back(spec.level_values(t * stride, k));
      out[static_cast<std::size_t>(k)].order.push_back(t * stride);
    }
    stride *= b;
  }
  if (stride != spec.base_rows) throw InvalidInput("ladder sizes do not match the number of levels");
  return out;
}

// A strictly positive feasible point: every active column spread over all
// levels with weights favouring small levels, plus some unseen mass.
std::optional<AssignmentMatrix> dense_point(const FeasibleSetSpec& spec) {
  const int R = spec.rows(), C = spec.cols();
  double elements = 0.0;
  for (int j = 1; j < C; ++j) elements += spec.targets(j);
  for (int power = 1; power <= 20; ++power) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(R);
    for (int i = 0; i < R; ++i) {
      if (!usable(spec, i)) continue;
      double top = 0.0;
      for (int k = 0; k < spec.dims; ++k) top = std::max(top, spec.level_values(i, k));
      w(i) = std::pow(top, -static_cast<double>(power));
    }
    w /= w.sum();
    double load = 0.0;
    for (int k = 0; k < spec.dims; ++k) load = std::max(load, spec.level_values.col(k).dot(w));
    if (elements * load >= 1.0) continue;
    const double unseen = 0.5 * (1.0 / load - elements);
    AssignmentMatrix X(R, C);
    for (int j = 0; j < C; ++j) X.col(j) = (j == 0 ? unseen : spec.targets(j)) * w;
    return X;
  }
  return std::nullopt;
}

double single_budget_dual(const AssignmentMatrix& G, const FeasibleSetSpec& spec, double lam) {
  double v = lam;
  for (int j = 1; j < spec.cols(); ++j) {
    if (spec.targets(j) <= 0.0) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < spec.rows(); ++i)
      if (usable(spec, i)) best = std::max(best, G(i, j) - lam * spec.level_values(i, 0));
    v += spec.targets(j) * best;
  }
  return v;
}

LmoResult multi_budget_lmo(const AssignmentMatrix& G, detail::BudgetLp& lp) {
  auto sol = lp.solve(G);
  LmoResult r;
  r.S = std::move(sol.S);
  r.value = sol.value;
  r.upper_bound = sol.upper_bound;
  r.multiplier = sol.budget_duals.empty() ? 0.0 : sol.budget_duals[0];
  r.column_duals = std::move(sol.column_duals);
  return r;
}

constexpr int kWarmupIters = 300;
constexpr double kStartTemperature = 1.0;
constexpr double kTemperatureDecay = 0.1;
constexpr double kMinTemperature = 1e-13;
constexpr int kNewtonCap = 200;
constexpr double kMaxExponentShift = 20.0;

// Entropy-smoothed dual of  max log g  over the fractional set. Variables are
// one price per active column and one multiplier per budget row:
//   F(nu, lam) = sum_j phi_j nu_j + sum_k lam_k + t sum_i top_i exp(s_i),
//   s_i = (L_i(nu) - lam . level_i) / (t top_i) - 1,
//   L_i(nu) = log sum_j exp(coef_ij - nu_j),  top_i = max_k level_i(k).
// exp(s_i) plays the role of the row total and the softmax of coef_i - nu
// splits it over columns, so a minimizer yields a near-feasible primal point.
class SmoothedDual {
 public:
  explicit SmoothedDual(const FeasibleSetSpec& spec) : spec_(spec), a_(spec.cols() - 1), d_(spec.dims) {
    for (int i = 0; i < spec.rows(); ++i)
      if (usable(spec, i)) rows_.push_back(i);
  }

  Eigen::VectorXd start(const std::vector<double>& prices) const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(a_ + d_);
    for (int j = 1; j <= a_; ++j) z(j - 1) = prices[static_cast<std::size_t>(j)];
    double lam = 0.0;
    for (int i : rows_) {
      double sum = 0.0;
      for (int k = 0; k < d_; ++k) sum += spec_.level_values(i, k);
      lam = std::max(lam, row_lse(z, i) / sum);
    }
    for (int k = 0; k < d_; ++k) z(a_ + k) = lam;
    return z;
  }

  std::optional<AssignmentMatrix> checked(AssignmentMatrix X) const {
    if (!X.allFinite() || !is_feasible(X, spec_, 1e-12 * std::max(1.0, spec_.targets.maxCoeff()))) return std::nullopt;
    return X;
  }

  // Moving to a lower temperature scales every exponent up; raise the
  // multipliers so that no row exponent grows.
  void retemper(Eigen::VectorXd& z, double from, double to) const {
    std::vector<double> terms;
    double peak = -std::numeric_limits<double>::infinity();
    for (int i : rows_) peak = std::max(peak, row_exponent(z, i, row_lse(z, i, &terms), from) + 1.0);
    if (!(peak > 0.0) || !std::isfinite(peak)) return;
    for (int k = 0; k < d_; ++k) z(a_ + k) += (from - to) * peak;
  }

  double value(const Eigen::VectorXd& z, double temp) const { return eval(z, temp, nullptr, nullptr); }

  // One sweep of exact per-coordinate updates: each price is moved so its
  // column receives exactly its target mass, each multiplier so its budget is
  // met (or to zero when the budget is slack there). Fixes columns the Newton
  // model cannot see because they currently carry almost no mass.
  void balance(Eigen::VectorXd& z, double temp) const {
    for (int v = 0; v < a_ + d_; ++v) balance_one(z, v, temp);
  }

  // Projected Newton at fixed temperature; returns the number of steps taken.
  int minimize(Eigen::VectorXd& z, double temp, int budget) const {
    const int N = a_ + d_;
    Eigen::VectorXd grad(N);
    Eigen::MatrixXd H(N, N);
    int steps = 0;
    double F = eval(z, temp, &grad, &H);
    // The start may overflow at a new, lower temperature: raise the multipliers.
    for (int guard = 0; !std::isfinite(F) && guard < 200; ++guard) {
      for (int k = 0; k < d_; ++k) z(a_ + k) = std::max(z(a_ + k), 1e-3) * 1.5;
      F = eval(z, temp, &grad, &H);
    }
    if (!std::isfinite(F)) return steps;
    bool limited = true;
    for (; steps < std::min(budget, kNewtonCap); ++steps) {
      if (limited) {
        balance(z, temp);
        F = eval(z, temp, &grad, &H);
      }
      std::vector<int> free;
      for (int v = 0; v < N; ++v) {
        const bool pinned = v >= a_ && z(v) <= 0.0 && grad(v) > 0.0;
        if (!pinned) free.push_back(v);
      }
      const int m = static_cast<int>(free.size());
      Eigen::MatrixXd Hf(m, m);
      Eigen::VectorXd gf(m);
      for (int p = 0; p < m; ++p) {
        gf(p) = grad(free[static_cast<std::size_t>(p)]);
        for (int q = 0; q < m; ++q) Hf(p, q) = H(free[static_cast<std::size_t>(p)], free[static_cast<std::size_t>(q)]);
      }
      // Row scales span many orders of magnitude; equilibrate before factoring.
      const double floor = 1e-12 * std::max(Hf.diagonal().maxCoeff(), 1e-300);
      Eigen::VectorXd scale = Hf.diagonal().cwiseMax(floor).cwiseSqrt().cwiseInverse();
      Eigen::MatrixXd Hs = scale.asDiagonal() * Hf * scale.asDiagonal();
      Hs.diagonal().array() += 1e-13;
      Eigen::VectorXd step = scale.cwiseProduct(Hs.ldlt().solve(-scale.cwiseProduct(gf)));
      if (!step.allFinite() || gf.dot(step) >= 0.0) step = -gf;
      const double decrement = -gf.dot(step);
      if (decrement <= 1e-15 * std::max(1.0, std::abs(F))) break;

      // Directions along which columns carry almost no mass are nearly flat,
      // so the Newton step can be huge; cap it before exp overflows.
      Eigen::VectorXd full = Eigen::VectorXd::Zero(N);
      for (int p = 0; p < m; ++p) full(free[static_cast<std::size_t>(p)]) = step(p);
      const double first = std::min(1.0, step_limit(z, full, temp));
      limited = first < 1e-3;

      bool moved = false;
      for (double alpha = first; alpha > 1e-12 * first; alpha *= 0.5) {
        Eigen::VectorXd zn = z;
        for (int p = 0; p < m; ++p) zn(free[static_cast<std::size_t>(p)]) += alpha * step(p);
        for (int k = 0; k < d_; ++k) zn(a_ + k) = std::max(zn(a_ + k), 0.0);
        const double Fn = eval(zn, temp, nullptr, nullptr);
        if (std::isfinite(Fn) && Fn <= F + 1e-4 * grad.dot(zn - z)) {
          z = std::move(zn);
          moved = true;
          break;
        }
      }
      if (!moved) break;
      F = eval(z, temp, &grad, &H);
    }
    return steps;
  }

  // Primal point read off the dual variables, then repaired: seen columns
  // rescaled to their targets, unseen mass scaled until a budget binds. If the
  // seen part alone overflows a budget, blend toward `fallback` (feasible).
  std::optional<AssignmentMatrix> primal(const Eigen::VectorXd& z, double temp, const AssignmentMatrix& fallback) const {
    const int R = spec_.rows(), C = spec_.cols();
    AssignmentMatrix X = AssignmentMatrix::Zero(R, C);
    std::vector<double> terms(static_cast<std::size_t>(C));
    for (int i : rows_) {
      const double L = row_lse(z, i, &terms);
      const double total = std::exp(row_exponent(z, i, L, temp));
      if (!std::isfinite(total)) return std::nullopt;
      for (int j = 0; j < C; ++j) X(i, j) = total * std::exp(terms[static_cast<std::size_t>(j)] - L);
    }
    for (int j = 1; j < C; ++j) {
      const double sum = X.col(j).sum();
      if (!(sum > 0.0)) return std::nullopt;
      X.col(j) *= spec_.targets(j) / sum;
    }
    double scale = std::numeric_limits<double>::infinity();
    bool overflow = false;
    for (int k = 0; k < d_; ++k) {
      const double unseen = spec_.level_values.col(k).dot(X.col(0));
      const double seen = spec_.level_values.col(k).dot(X.rightCols(C - 1).rowwise().sum());
      if (seen >= 1.0) overflow = true;
      else if (unseen > 0.0) scale = std::min(scale, (1.0 - seen) / unseen);
    }
    if (!overflow) {
      if (std::isfinite(scale)) X.col(0) *= scale;
      return checked(std::move(X));
    }
    X.col(0).setZero();
    double theta = 1.0;
    for (int k = 0; k < d_; ++k) {
      const double b = budget(X, spec_, k), bf = budget(fallback, spec_, k);
      if (b > 1.0) theta = std::min(theta, (1.0 - bf) / (b - bf));
    }
    if (!(theta > 0.0)) return std::nullopt;
    return checked(theta * X + (1.0 - theta) * fallback);
  }

 private:
  double row_lse(const Eigen::VectorXd& z, int i, std::vector<double>* out = nullptr) const {
    const int C = spec_.cols();
    std::vector<double> local;
    std::vector<double>& terms = out ? *out : local;
    terms.resize(static_cast<std::size_t>(C));
    for (int j = 0; j < C; ++j) terms[static_cast<std::size_t>(j)] = spec_.coef(i, j) - (j == 0 ? 0.0 : z(j - 1));
    return log_sum_exp(terms);
  }

  // Largest step length along dz that keeps every row exponent, to first
  // order, below max(0, current max) + kMaxExponentShift.
  double step_limit(const Eigen::VectorXd& z, const Eigen::VectorXd& dz, double temp) const {
    const int C = spec_.cols();
    std::vector<double> terms;
    std::vector<double> s(rows_.size()), ds(rows_.size());
    double ceiling = 0.0;
    for (std::size_t e = 0; e < rows_.size(); ++e) {
      const int i = rows_[e];
      const double L = row_lse(z, i, &terms);
      s[e] = row_exponent(z, i, L, temp);
      double change = 0.0;
      for (int j = 1; j < C; ++j) change -= std::exp(terms[static_cast<std::size_t>(j)] - L) * dz(j - 1);
      for (int k = 0; k < d_; ++k) change -= spec_.level_values(i, k) * dz(a_ + k);
      ds[e] = change / (temp * top(i));
      ceiling = std::max(ceiling, s[e]);
    }
    ceiling += kMaxExponentShift;
    double limit = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < rows_.size(); ++e)
      if (ds[e] > 0.0) limit = std::min(limit, (ceiling - s[e]) / ds[e]);
    return limit;
  }

  // Mass in column v (a price) or budget use (a multiplier), with its
  // derivative in z(v); both are decreasing in z(v). nullopt on overflow.
  std::optional<std::pair<double, double>> coordinate_mass(const Eigen::VectorXd& z, int v, double temp) const {
    std::vector<double> terms;
    double mass = 0.0, slope = 0.0;
    for (int i : rows_) {
      const double L = row_lse(z, i, &terms);
      const double s = row_exponent(z, i, L, temp);
      if (s > 700.0) return std::nullopt;
      const double r = std::exp(s);
      const double w = v < a_ ? std::exp(terms[static_cast<std::size_t>(v + 1)] - L) : spec_.level_values(i, v - a_);
      mass += r * w;
      slope -= v < a_ ? r * w * (w / (temp * top(i)) + 1.0 - w) : r * w * w / (temp * top(i));
    }
    return std::make_pair(mass, slope);
  }

  void balance_one(Eigen::VectorXd& z, int v, double temp) const {
    const double target = v < a_ ? spec_.targets(v + 1) : 1.0;
    const double x0 = z(v);
    // Root of log mass(x) - log target, kept inside a bracket [lo, hi] once one
    // is known; mass is decreasing, so lo has too much mass and hi too little.
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    if (v >= a_) lo = -std::numeric_limits<double>::infinity();
    double x = x0;
    for (int iter = 0; iter < 100; ++iter) {
      z(v) = x;
      auto m = coordinate_mass(z, v, temp);
      if (!m) {
        lo = x;  // overflow means far too much mass
        x = std::isfinite(hi) ? 0.5 * (lo + hi) : x + std::max(1.0, std::abs(x)) * 1e-3 + 1.0;
        continue;
      }
      const auto [mass, slope] = *m;
      if (v >= a_ && x <= 0.0 && mass <= target) {
        z(v) = 0.0;
        return;
      }
      const double f = mass > 0.0 ? std::log(mass / target) : -std::numeric_limits<double>::infinity();
      if (std::abs(f) < 1e-13) return;
      if (f > 0.0) lo = x; else hi = x;
      double next;
      if (mass > 0.0 && slope < 0.0) {
        next = x - f * mass / slope;
      } else {
        next = std::isfinite(lo) ? lo : x - 1.0;
      }
      if (std::isfinite(lo) && std::isfinite(hi)) {
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(x))) return;
      }
      if (v >= a_) next = std::max(next, 0.0);
      if (next == x) return;
      x = next;
    }
    z(v) = x;
  }

  double top(int i) const {
    double t = 0.0;
    for (int k = 0; k < d_; ++k) t = std::max(t, spec_.level_values(i, k));
    return t;
  }

  double row_exponent(const Eigen::VectorXd& z, int i, double L, double temp) const {
    double charge = 0.0;
    for (int k = 0; k < d_; ++k) charge += z(a_ + k) * spec_.level_values(i, k);
    return (L - charge) / (temp * top(i)) - 1.0;
  }

  double eval(const Eigen::VectorXd& z, double temp, Eigen::VectorXd* grad, Eigen::MatrixXd* H) const {
    const int C = spec_.cols(), N = a_ + d_;
    double F = 0.0;
    for (int j = 1; j < C; ++j) F += spec_.targets(j) * z(j - 1);
    for (int k = 0; k < d_; ++k) F += z(a_ + k);
    if (grad) {
      grad->resize(N);
      for (int j = 1; j < C; ++j) (*grad)(j - 1) = spec_.targets(j);
      for (int k = 0; k < d_; ++k) (*grad)(a_ + k) = 1.0;
      H->setZero(N, N);
    }
    std::vector<double> terms;
    Eigen::VectorXd gi(N), pi(a_);
    for (int i : rows_) {
      const double L = row_lse(z, i, &terms);
      const double s = row_exponent(z, i, L, temp);
      if (s > 700.0) return std::numeric_limits<double>::infinity();
      const double r = std::exp(s);
      F += temp * top(i) * r;
      if (!grad) continue;
      for (int j = 1; j < C; ++j) pi(j - 1) = std::exp(terms[static_cast<std::size_t>(j)] - L);
      gi.head(a_) = -pi;
      for (int k = 0; k < d_; ++k) gi(a_ + k) = -spec_.level_values(i, k);
      *grad += r * gi;
      H->noalias() += (r / (temp * top(i))) * gi * gi.transpose();
      H->topLeftCorner(a_, a_).diagonal() += r * pi;
      H->topLeftCorner(a_, a_).noalias() -= r * pi * pi.transpose();
    }
    return F;
  }

  const FeasibleSetSpec& spec_;
  int a_, d_;
  std::vector<int> rows_;
};

}  // namespace

SolverConfig SolverConfig::defaults(const FeasibleSetSpec& spec) {
  SolverConfig cfg;
  double scale = 0.0;
  for (int k = 0; k < spec.dims; ++k) {
    const double n = spec.length(k);
    if (n > 1.0) scale += n * std::log(n);
  }
  cfg.delta = 1e-6 * std::max(scale, 1.0);
  return cfg;
}

LmoResult lmo(const AssignmentMatrix& G, const FeasibleSetSpec& spec, double tol) {
  if (G.rows() != spec.rows() || G.cols() != spec.cols()) throw InvalidInput("gradient shape does not match the feasible set");
  if (spec.dims != 1) {
    detail::BudgetLp lp(spec);
    return multi_budget_lmo(G, lp);
  }
  const int R = spec.rows();
  const std::vector<int> act = spec.active_columns();
  std::vector<int> rows;
  for (int i = 0; i < R; ++i)
    if (usable(spec, i)) rows.push_back(i);
  if (rows.empty()) throw Infeasible("no usable probability level");
  auto z = [&](int i) { return spec.level_values(i, 0); };

  double lam_min = 0.0;
  int unseen_row = -1;
  for (int i : rows) {
    const double ratio = G(i, 0) / z(i);
    if (ratio > lam_min) {
      lam_min = ratio;
      unseen_row = i;
    }
  }

  std::vector<int> pick(act.size());
  auto assign = [&](double lam, std::vector<int>& out) {
    double b = 0.0;
    for (std::size_t e = 0; e < act.size(); ++e) {
      const int j = act[e];
      int best = -1;
      double bv = 0.0;
      for (int i : rows) {
        const double v = G(i, j) - lam * z(i);
        if (best < 0 || v > bv) {
          best = i;
          bv = v;
        }
      }
      out[e] = best;
      b += spec.targets(j) * z(best);
    }
    return b;
  };
  auto place = [&](const std::vector<int>& where, double weight, AssignmentMatrix& S) {
    for (std::size_t e = 0; e < act.size(); ++e) S(where[e], act[e]) += weight * spec.targets(act[e]);
  };

  LmoResult r;
  r.S = AssignmentMatrix::Zero(R, spec.cols());
  const double b0 = assign(lam_min, pick);
  if (b0 <= 1.0) {
    place(pick, 1.0, r.S);
    if (lam_min > 0.0) r.S(unseen_row, 0) = (1.0 - b0) / z(unseen_row);
    r.multiplier = lam_min;
  } else {
    int low_row = rows.front();
    for (int i : rows)
      if (z(i) < z(low_row)) low_row = i;
    // Past hi every column prefers the smallest level.
    double hi = lam_min;
    for (int i : rows) {
      if (z(i) <= z(low_row)) continue;
      for (int j : act) hi = std::max(hi, (G(i, j) - G(low_row, j)) / (z(i) - z(low_row)));
    }
    hi += 1.0;
    std::vector<int> pick_hi(act.size()), pick_lo(act.size());
    double b_hi = assign(hi, pick_hi);
    if (b_hi > 1.0 + 1e-12) throw Infeasible("profile mass does not fit the budget even at the smallest level");
    double lo = lam_min;
    double b_lo = b0;
    pick_lo = pick;
    while (hi - lo > tol * std::max(1.0, std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      const double b = assign(mid, pick);
      if (b > 1.0) {
        lo = mid;
        b_lo = b;
        pick_lo = pick;
      } else {
        hi = mid;
        b_hi = b;
        pick_hi = pick;
      }
    }
    const double theta = std::clamp((1.0 - b_hi) / (b_lo - b_hi), 0.0, 1.0);
    place(pick_hi, 1.0 - theta, r.S);
    if (theta > 0.0) place(pick_lo, theta, r.S);
    r.multiplier = hi;
  }
  r.value = inner(G, r.S);
  r.upper_bound = std::max(single_budget_dual(G, spec, r.multiplier), r.value);
  r.column_duals.assign(static_cast<std::size_t>(spec.cols()), 0.0);
  for (int j : act) {
    double best = -std::numeric_limits<double>::infinity();
    for (int i : rows) best = std::max(best, G(i, j) - r.multiplier * z(i));
    r.column_duals[static_cast<std::size_t>(j)] = best;
  }
  return r;
}

AssignmentMatrix initial_point(const FeasibleSetSpec& spec) {
  const int R = spec.rows(), C = spec.cols(), d = spec.dims;
  AssignmentMatrix X = AssignmentMatrix::Zero(R, C);
  const std::vector<int> act = spec.active_columns();
  if (act.empty()) return X;
  const std::vector<Ladder> lad = ladders_of(spec);

  // spots[e][k]: (ladder position, weight) pairs for column act[e] in coordinate k.
  using Spot = std::vector<std::pair<int, double>>;
  std::vector<std::vector<Spot>> spots(act.size(), std::vector<Spot>(static_cast<std::size_t>(d)));
  for (int k = 0; k < d; ++k) {
    const auto& vals = lad[static_cast<std::size_t>(k)].values;
    if (vals.empty()) throw Infeasible("no usable probability level");
    const double len = spec.length(k);
    std::vector<int> tau(act.size(), 0);
    for (std::size_t e = 0; e < act.size(); ++e) {
      const double m = spec.freqs(act[e], k);
      if (m <= 0.0 || len <= 0.0) continue;
      const double target = std::log(m / len);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < vals.size(); ++t) {
        const double dist = std::abs(std::log(vals[t]) - target);
        if (dist < best) {
          best = dist;
          tau[e] = static_cast<int>(t);
        }
      }
    }
    auto load = [&](int shift) {
      double b = 0.0;
      for (std::size_t e = 0; e < act.size(); ++e) b += spec.targets(act[e]) * vals[static_cast<std::size_t>(std::max(tau[e] - shift, 0))];
      return b;
    };
    const int max_tau = *std::max_element(tau.begin(), tau.end());
    int s = 0;
    while (load(s) > 1.0 && s < max_tau) ++s;
    if (load(s) > 1.0 + 1e-12) throw Infeasible("profile mass does not fit the budget even at the smallest level");
    const double theta = (s > 0 && load(s) < 1.0) ? (1.0 - load(s)) / (load(s - 1) - load(s)) : 0.0;
    for (std::size_t e = 0; e < act.size(); ++e) {
      Spot& sp = spots[e][static_cast<std::size_t>(k)];
      sp.push_back({std::max(tau[e] - s, 0), 1.0 - theta});
      if (theta > 0.0) sp.push_back({std::max(tau[e] - s + 1, 0), theta});
    }
  }

  for (std::size_t e = 0; e < act.size(); ++e) {
    // Product of the per-coordinate spot distributions.
    std::vector<std::pair<int, double>> cells = {{0, 1.0}};
    for (int k = 0; k < d; ++k) {
      std::vector<std::pair<int, double>> next;
      for (const auto& [row, w] : cells)
        for (const auto& [pos, pw] : spots[e][static_cast<std::size_t>(k)])
          next.push_back({row + lad[static_cast<std::size_t>(k)].order[static_cast<std::size_t>(pos)], w * pw});
      cells = std::move(next);
    }
    for (const auto& [row, w] : cells) X(row, act[e]) += w * spec.targets(act[e]);
  }
  return X;
}

SolveResult maximize_g(const FeasibleSetSpec& spec, const SolverConfig& cfg) {
  if (spec.variant != SetVariant::kFractional && spec.variant != SetVariant::kIntegral)
    throw InvalidInput("the solver works on the plain fractional set");
  if (!(cfg.delta > 0.0) || cfg.max_iters < 1) throw InvalidInput("solver needs delta > 0 and max_iters >= 1");

  SolveResult res;
  const std::vector<int> active = spec.active_columns();
  if (active.empty()) {
    res.X = AssignmentMatrix::Zero(spec.rows(), spec.cols());
    res.certified = true;
    return res;
  }
  const FeasibleSetSpec cs = compact(spec, active);
  const int R = cs.rows(), C = cs.cols();

  AssignmentMatrix X = initial_point(cs);
  if (auto dense = dense_point(cs)) X = (1.0 - kInteriorWeight) * X + kInteriorWeight * *dense;
  double f = log_g(X, cs);

  std::optional<detail::BudgetLp> lp;
  std::optional<detail::BudgetLp> budget_only_lp;
  FeasibleSetSpec budget_only;
  if (cs.dims > 1) {
    lp.emplace(cs);
    budget_only = FeasibleSetSpec::make(cs.level_values, cs.freqs.topRows(1), Eigen::VectorXd::Zero(1),
                                        SetVariant::kFractional);
    budget_only_lp.emplace(budget_only);
  }

  // Lagrangian bound sum_j nu_j phi_j + max_{budget} sum_i R_i L_i(nu),
  // L_i(nu) = log sum_j exp(coef_ij - nu_j) with nu_0 = 0. Valid for any nu.
  auto dual_bound = [&](const std::vector<double>& nu) {
    Eigen::VectorXd L(R);
    std::vector<double> terms(static_cast<std::size_t>(C));
    for (int i = 0; i < R; ++i) {
      for (int j = 0; j < C; ++j) terms[static_cast<std::size_t>(j)] = cs.coef(i, j) - nu[static_cast<std::size_t>(j)];
      L(i) = log_sum_exp(terms);
    }
    double v = 0.0;
    for (int j = 1; j < C; ++j) v += cs.targets(j) * nu[static_cast<std::size_t>(j)];
    if (cs.dims == 1) {
      double best = 0.0;
      for (int i = 0; i < R; ++i)
        if (usable(cs, i)) best = std::max(best, L(i) / cs.level_values(i, 0));
      return v + best;
    }
    AssignmentMatrix Gb = L;
    return v + std::max(0.0, budget_only_lp->solve(Gb).upper_bound);
  };

  // Column prices read off the iterate: at the optimum coef_ij - log(X_ij / X_i0)
  // is the same for every row.
  auto kkt_prices = [&](const AssignmentMatrix& G) {
    std::vector<double> nu(static_cast<std::size_t>(C), 0.0);
    for (int j = 1; j < C; ++j) {
      double num = 0.0, den = 0.0;
      for (int i = 0; i < R; ++i) {
        if (X(i, j) <= 0.0 || X(i, 0) <= 0.0) continue;
        num += X(i, j) * (G(i, j) - G(i, 0));
        den += X(i, j);
      }
      nu[static_cast<std::size_t>(j)] = den > 0.0 ? num / den : 0.0;
    }
    return nu;
  };

  // Every bound below caps the optimum; the certificate is the best cap minus
  // the best objective seen.
  double upper = std::numeric_limits<double>::infinity();
  auto gap_now = [&] { return std::max(upper - f, 0.0); };
  const int warmup = std::min(cfg.max_iters, kWarmupIters);
  int it = 0;
  for (;; ++it) {
    const AssignmentMatrix G = grad_log_g(X, cs, kTinyClamp);
    LmoResult step = cs.dims == 1 ? lmo(G, cs, cfg.lmo_tol) : multi_budget_lmo(G, *lp);
    const double gx = inner(G, X);
    upper = std::min(upper, f + std::max(step.upper_bound - gx, 0.0));
    if (gap_now() > cfg.delta) {
      upper = std::min(upper, dual_bound(kkt_prices(G)));
      upper = std::min(upper, dual_bound(step.column_duals));
    }
    if (gap_now() <= cfg.delta || it >= warmup) break;

    const AssignmentMatrix D = step.S - X;
    const double slope = step.value - gx;
    if (!(slope > 0.0)) break;
    double gamma = std::min(2.0 / (it + 2.0), kMaxStep);
    bool moved = false;
    for (int h = 0; h < kMaxHalvings; ++h, gamma *= 0.5) {
      AssignmentMatrix Xn = X + gamma * D;
      const double fn = log_g(Xn, cs);
      if (fn >= f + 0.5 * gamma * slope) {
        X = std::move(Xn);
        f = fn;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }

  if (gap_now() > cfg.delta && it < cfg.max_iters) {
    SmoothedDual sd(cs);
    // Prices read off a rough iterate can be far off; zero prices are a safe
    // fallback. Keep whichever start has the smaller smoothed value.
    Eigen::VectorXd z = sd.start(kkt_prices(grad_log_g(X, cs, kTinyClamp)));
    {
      Eigen::VectorXd z0 = sd.start(std::vector<double>(static_cast<std::size_t>(C), 0.0));
      if (sd.value(z0, kStartTemperature) < sd.value(z, kStartTemperature)) z = std::move(z0);
    }
    for (double temp = kStartTemperature; temp >= kMinTemperature && it < cfg.max_iters; temp *= kTemperatureDecay) {
      if (temp < kStartTemperature) sd.retemper(z, temp / kTemperatureDecay, temp);
      it += sd.minimize(z, temp, cfg.max_iters - it);
      std::vector<double> nu(static_cast<std::size_t>(C), 0.0);
      for (int j = 1; j < C; ++j) nu[static_cast<std::size_t>(j)] = z(j - 1);
      upper = std::min(upper, dual_bound(nu));
      if (auto cand = sd.primal(z, temp, X)) {
        const double fc = log_g(*cand, cs);
        if (fc > f) {
          X = std::move(*cand);
          f = fc;
        }
      }
      if (gap_now() <= cfg.delta) break;
    }
  }

  res.X = expand(X, spec, active);
  res.objective = log_g(res.X, spec);
  res.certified_gap = gap_now();
  res.iterations = it;
  res.certified = res.certified_gap <= cfg.delta;
  return res;
}

}  // namespace pml
