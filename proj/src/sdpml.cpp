#include "pml/sdpml.hpp"

#include <cmath>
#include <limits>

#include "pml/errors.hpp"

namespace pml {

namespace {

constexpr double kIntegralTol = 1e-9;

void check_shape(const AssignmentMatrix& X, const FeasibleSetSpec& spec) {
  if (X.rows() != spec.rows() || X.cols() != spec.cols())
    throw InvalidInput("assignment matrix shape does not match the feasible set");
}

// Row usable for mass: every level coordinate positive.
bool row_usable(const FeasibleSetSpec& spec, int i) {
  for (int k = 0; k < spec.dims; ++k)
    if (!(spec.level_values(i, k) > 0.0)) return false;
  return true;
}

// Appended row i of an extended set may only hold column i - base_rows + 1.
bool entry_allowed(const FeasibleSetSpec& spec, int i, int j) {
  if (spec.variant != SetVariant::kExtended || i < spec.base_rows) return true;
  return j == i - spec.base_rows + 1;
}

}  // namespace

double FeasibleSetSpec::length(int k) const {
  double s = 0.0;
  for (int j = 1; j < cols(); ++j) s += targets(j) * freqs(j, k);
  return s;
}

std::vector<int> FeasibleSetSpec::active_columns() const {
  std::vector<int> a;
  for (int j = 1; j < cols(); ++j)
    if (targets(j) > 0.0) a.push_back(j);
  return a;
}

FeasibleSetSpec FeasibleSetSpec::make(const Eigen::MatrixXd& level_values, const Eigen::MatrixXd& freqs,
                                      const Eigen::VectorXd& targets, SetVariant variant) {
  if (level_values.cols() != freqs.cols() || level_values.cols() < 1)
    throw InvalidInput("levels and frequencies must share a positive dimension");
  if (targets.size() != freqs.rows() || freqs.rows() < 1) throw InvalidInput("one target per frequency column");
  if (freqs.row(0).cwiseAbs().maxCoeff() != 0.0) throw InvalidInput("column 0 must be the unseen column");
  for (Eigen::Index j = 1; j < targets.size(); ++j)
    if (targets(j) < 0.0) throw InvalidInput("column targets must be nonnegative");

  FeasibleSetSpec s;
  s.variant = variant;
  s.dims = static_cast<int>(level_values.cols());
  s.base_rows = static_cast<int>(level_values.rows());
  s.level_values = level_values;
  s.freqs = freqs;
  s.targets = targets;
  s.targets(0) = 0.0;
  s.level_logs = level_values.array().log().matrix();
  if (s.dims == 1) s.ladder = {s.base_rows};
  s.coef.resize(level_values.rows(), freqs.rows());
  for (Eigen::Index i = 0; i < level_values.rows(); ++i)
    for (Eigen::Index j = 0; j < freqs.rows(); ++j) {
      double c = 0.0;
      for (int k = 0; k < s.dims; ++k)
        if (freqs(j, k) != 0.0) c += freqs(j, k) * s.level_logs(i, k);
      s.coef(i, j) = c;
    }
  return s;
}

FeasibleSetSpec FeasibleSetSpec::from_grids(const DiscreteProfile& phi_prime, const ProbabilityGrid& pgrid,
                                            SetVariant variant) {
  const int b1 = pgrid.size(), b2 = phi_prime.grid.size();
  Eigen::MatrixXd levels(b1, 1);
  for (int i = 0; i < b1; ++i) levels(i, 0) = pgrid.value(i);
  Eigen::MatrixXd freqs = Eigen::MatrixXd::Zero(b2 + 1, 1);
  Eigen::VectorXd targets = Eigen::VectorXd::Zero(b2 + 1);
  for (int j = 0; j < b2; ++j) {
    freqs(j + 1, 0) = static_cast<double>(phi_prime.grid.value(j));
    targets(j + 1) = static_cast<double>(phi_prime.counts[static_cast<std::size_t>(j)]);
  }
  FeasibleSetSpec s = make(levels, freqs, targets, variant);
  // Use the exact ladder logs rather than log(exp(.)).
  for (int i = 0; i < b1; ++i) s.level_logs(i, 0) = pgrid.log_value(i);
  for (int i = 0; i < b1; ++i)
    for (int j = 0; j <= b2; ++j) s.coef(i, j) = freqs(j, 0) * s.level_logs(i, 0);
  return s;
}

FeasibleSetSpec FeasibleSetSpec::restricted_to(const Eigen::VectorXd& totals) const {
  if (totals.size() != rows()) throw InvalidInput("one row total per level");
  FeasibleSetSpec s = *this;
  s.variant = SetVariant::kQRestricted;
  s.row_totals = totals;
  return s;
}

FeasibleSetSpec FeasibleSetSpec::extended_with(const Eigen::MatrixXd& extra_levels) const {
  if (extra_levels.rows() != cols() - 1 || extra_levels.cols() != dims)
    throw InvalidInput("extended sets need one extra level per frequency column");
  FeasibleSetSpec s = *this;
  s.variant = SetVariant::kExtended;
  const int b1 = base_rows, extra = static_cast<int>(extra_levels.rows());
  s.level_values.conservativeResize(b1 + extra, dims);
  s.level_logs.conservativeResize(b1 + extra, dims);
  s.coef.conservativeResize(b1 + extra, cols());
  for (int r = 0; r < extra; ++r) {
    for (int k = 0; k < dims; ++k) {
      s.level_values(b1 + r, k) = extra_levels(r, k);
      s.level_logs(b1 + r, k) = std::log(extra_levels(r, k));
    }
    for (int j = 0; j < cols(); ++j) {
      double c = 0.0;
      for (int k = 0; k < dims; ++k)
        if (freqs(j, k) != 0.0) c += freqs(j, k) * s.level_logs(b1 + r, k);
      s.coef(b1 + r, j) = c;
    }
  }
  return s;
}

double budget(const AssignmentMatrix& X, const FeasibleSetSpec& spec, int k) {
  check_shape(X, spec);
  double s = 0.0;
  for (int i = 0; i < spec.rows(); ++i) {
    const double r = X.row(i).sum();
    if (r != 0.0) s += spec.level_values(i, k) * r;
  }
  return s;
}

bool is_feasible(const AssignmentMatrix& X, const FeasibleSetSpec& spec, double tol) {
  check_shape(X, spec);
  if (X.minCoeff() < -tol) return false;
  for (int j = 1; j < spec.cols(); ++j)
    if (std::abs(X.col(j).sum() - spec.targets(j)) > tol) return false;
  for (int k = 0; k < spec.dims; ++k)
    if (budget(X, spec, k) > 1.0 + tol) return false;
  if (spec.variant == SetVariant::kQRestricted)
    for (int i = 0; i < spec.rows(); ++i)
      if (std::abs(X.row(i).sum() - spec.row_totals(i)) > tol) return false;
  for (int i = 0; i < spec.rows(); ++i)
    for (int j = 0; j < spec.cols(); ++j)
      if (std::abs(X(i, j)) > tol && (!entry_allowed(spec, i, j) || !row_usable(spec, i))) return false;
  return true;
}

double log_w_sdpml(const AssignmentMatrix& X, const FeasibleSetSpec& spec) {
  check_shape(X, spec);
  double v = 0.0;
  for (int i = 0; i < spec.rows(); ++i) {
    double row = 0.0;
    for (int j = 0; j < spec.cols(); ++j) {
      const double x = X(i, j);
      const double r = std::round(x);
      if (x < 0.0 || std::abs(x - r) > kIntegralTol) throw InvalidInput("log_w_sdpml needs a nonnegative integral matrix");
      if (r == 0.0) continue;
      row += r;
      v += r * spec.coef(i, j) - log_factorial(r);
    }
    v += log_factorial(row);
  }
  return v;
}

double log_g(const AssignmentMatrix& X, const FeasibleSetSpec& spec) {
  check_shape(X, spec);
  double v = 0.0;
  for (int i = 0; i < spec.rows(); ++i) {
    double row = 0.0;
    for (int j = 0; j < spec.cols(); ++j) {
      const double x = X(i, j);
      if (x < 0.0) throw InvalidInput("log_g needs a nonnegative matrix");
      if (x == 0.0) continue;
      row += x;
      v += x * spec.coef(i, j) - x * std::log(x);
    }
    v += xlogx(row);
  }
  return v;
}

AssignmentMatrix grad_log_g(const AssignmentMatrix& X, const FeasibleSetSpec& spec, double eta) {
  check_shape(X, spec);
  AssignmentMatrix G(spec.rows(), spec.cols());
  for (int i = 0; i < spec.rows(); ++i) {
    const double log_row = std::log(std::max(X.row(i).sum(), eta));
    for (int j = 0; j < spec.cols(); ++j) G(i, j) = spec.coef(i, j) + log_row - std::log(std::max(X(i, j), eta));
  }
  return G;
}

StirlingBounds stirling_bounds(const AssignmentMatrix& X, const FeasibleSetSpec& spec) {
  check_shape(X, spec);
  auto term = [](double k) { return 1.0 + 0.5 * std::log(k + 1.0); };
  StirlingBounds b;
  for (int i = 0; i < spec.rows(); ++i) {
    const double row = X.row(i).sum();
    b.upper += term(row);
    for (int j = 0; j < spec.cols(); ++j)
      if (X(i, j) > 0.0 || row > 0.0) b.lower -= term(X(i, j));
  }
  return b;
}

void for_each_integral_K(const FeasibleSetSpec& spec, const EnumerationOptions& opts,
                         const std::function<void(const AssignmentMatrix&)>& visit) {
  const int R = spec.rows(), C = spec.cols(), d = spec.dims;
  constexpr double kBudgetTol = 1e-12;
  for (int j = 1; j < C; ++j)
    if (spec.targets(j) != std::round(spec.targets(j))) throw InvalidInput("integral enumeration needs integral targets");

  const bool restricted = spec.variant == SetVariant::kQRestricted;
  AssignmentMatrix X = AssignmentMatrix::Zero(R, C);
  std::vector<double> used(static_cast<std::size_t>(d), 0.0);
  std::vector<double> row_room(static_cast<std::size_t>(R), 0.0);
  if (restricted)
    for (int i = 0; i < R; ++i) row_room[static_cast<std::size_t>(i)] = spec.row_totals(i);
  std::size_t produced = 0;

  auto fits = [&](int i, double count) {
    for (int k = 0; k < d; ++k)
      if (used[static_cast<std::size_t>(k)] + count * spec.level_values(i, k) > 1.0 + kBudgetTol) return false;
    return true;
  };
  auto add_mass = [&](int i, double count) {
    for (int k = 0; k < d; ++k) used[static_cast<std::size_t>(k)] += count * spec.level_values(i, k);
  };

  auto emit = [&]() {
    if (++produced > opts.cap) throw GuardExceeded("integral enumeration exceeded its cap");
    visit(X);
  };

  // Unseen column, row by row. Under a q-restriction it is determined.
  std::function<void(int)> unseen = [&](int i) {
    if (i == R) {
      emit();
      return;
    }
    if (restricted) {
      const double u = row_room[static_cast<std::size_t>(i)];
      X(i, 0) = u;
      unseen(i + 1);
      X(i, 0) = 0.0;
      return;
    }
    if (!row_usable(spec, i) || !entry_allowed(spec, i, 0)) {
      unseen(i + 1);
      return;
    }
    std::int64_t top = opts.unseen_cap.value_or(std::numeric_limits<std::int64_t>::max());
    for (int k = 0; k < d; ++k) {
      const double room = (1.0 - used[static_cast<std::size_t>(k)] + kBudgetTol) / spec.level_values(i, k);
      top = std::min<std::int64_t>(top, static_cast<std::int64_t>(std::floor(std::max(room, 0.0))));
    }
    for (std::int64_t u = 0; u <= top; ++u) {
      X(i, 0) = static_cast<double>(u);
      add_mass(i, static_cast<double>(u));
      unseen(i + 1);
      add_mass(i, -static_cast<double>(u));
    }
    X(i, 0) = 0.0;
  };

  // Seen columns: compositions of each target over the allowed rows.
  std::function<void(int, int, double)> seen = [&](int j, int i, double left) {
    if (j == C) {
      unseen(0);
      return;
    }
    if (i == R) {
      if (left == 0.0) seen(j + 1, 0, j + 1 < C ? spec.targets(j + 1) : 0.0);
      return;
    }
    if (!row_usable(spec, i) || !entry_allowed(spec, i, j)) {
      seen(j, i + 1, left);
      return;
    }
    double top = left;
    if (restricted) top = std::min(top, row_room[static_cast<std::size_t>(i)]);
    for (double x = 0.0; x <= top; x += 1.0) {
      if (!restricted && !fits(i, x)) break;
      X(i, j) = x;
      add_mass(i, x);
      if (restricted) row_room[static_cast<std::size_t>(i)] -= x;
      seen(j, i + 1, left - x);
      if (restricted) row_room[static_cast<std::size_t>(i)] += x;
      add_mass(i, -x);
    }
    X(i, j) = 0.0;
  };

  if (C == 1) {
    unseen(0);
  } else {
    seen(1, 0, spec.targets(1));
  }
}

std::vector<AssignmentMatrix> enumerate_integral_K(const FeasibleSetSpec& spec, const EnumerationOptions& opts) {
  std::vector<AssignmentMatrix> out;
  for_each_integral_K(spec, opts, [&](const AssignmentMatrix& X) { out.push_back(X); });
  return out;
}

double log_c_targets(const FeasibleSetSpec& spec) {
  double v = 0.0;
  for (int k = 0; k < spec.dims; ++k) {
    v += log_factorial(spec.length(k));
    for (int j = 1; j < spec.cols(); ++j) v -= spec.targets(j) * log_factorial(spec.freqs(j, k));
  }
  return v;
}

double log_dpml_sum(const DiscretePseudoDistribution& q, const DiscreteProfile& phi_prime,
                    const FeasibleSetSpec& spec, std::size_t cap) {
  if (spec.dims != 1 || spec.base_rows != q.grid.size() || spec.cols() != phi_prime.grid.size() + 1)
    throw InvalidInput("pseudo-distribution and profile must match the feasible set grids");
  for (int j = 1; j < spec.cols(); ++j)
    if (spec.targets(j) != static_cast<double>(phi_prime.counts[static_cast<std::size_t>(j - 1)]))
      throw InvalidInput("feasible set targets differ from the discrete profile");
  Eigen::VectorXd totals = Eigen::VectorXd::Zero(spec.rows());
  for (const auto& [i, c] : q.level_counts) totals(i) = static_cast<double>(c);
  FeasibleSetSpec restricted = spec.restricted_to(totals);
  LogSumExp acc;
  EnumerationOptions opts;
  opts.cap = cap;
  for_each_integral_K(restricted, opts, [&](const AssignmentMatrix& X) { acc.add(log_w_sdpml(X, restricted)); });
  if (acc.empty()) return kNegInf;
  return log_c_targets(spec) + acc.value();
}

}  // namespace pml
