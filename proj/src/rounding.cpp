#include "pml/rounding.hpp"

#include <cmath>

#include "pml/errors.hpp"

namespace pml {

namespace {
// Solver noise like 2.9999999999 should floor to 3.
constexpr double kSnap = 1e-9;

double snapped_floor(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= kSnap ? r : std::floor(x);
}
}  // namespace

RoundedSolution round_assignment(const AssignmentMatrix& Xf, const FeasibleSetSpec& spec) {
  if (spec.variant != SetVariant::kFractional && spec.variant != SetVariant::kIntegral)
    throw InvalidInput("rounding expects a plain fractional feasible set");
  if (!is_feasible(Xf, spec, 1e-9)) throw InvalidInput("rounding input is not feasible");

  const int b1 = spec.rows(), C = spec.cols(), d = spec.dims;
  RoundedSolution out;
  out.extra_levels = Eigen::MatrixXd::Zero(C - 1, d);
  AssignmentMatrix base(b1, C);
  for (int j = 0; j < C; ++j)
    for (int i = 0; i < b1; ++i) base(i, j) = std::max(snapped_floor(Xf(i, j)), 0.0);

  std::vector<double> leftover(static_cast<std::size_t>(C), 0.0);
  for (int j = 1; j < C; ++j) {
    const double left = spec.targets(j) - base.col(j).sum();
    if (left < 0.0) throw InvalidInput("rounding input overfills a column");
    leftover[static_cast<std::size_t>(j)] = left;
    if (left == 0.0) continue;
    for (int k = 0; k < d; ++k) {
      double mass = 0.0;
      for (int i = 0; i < b1; ++i) mass += (Xf(i, j) - base(i, j)) * spec.level_values(i, k);
      out.extra_levels(j - 1, k) = mass / left;
    }
  }

  out.spec_ext = spec.extended_with(out.extra_levels);
  out.X = AssignmentMatrix::Zero(b1 + C - 1, C);
  out.X.topRows(b1) = base;
  for (int j = 1; j < C; ++j) out.X(b1 + j - 1, j) = leftover[static_cast<std::size_t>(j)];
  return out;
}

}  // namespace pml
