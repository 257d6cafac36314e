#include "pml/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pml/errors.hpp"

namespace pml {

namespace {

constexpr double kNormalizedTol = 1e-9;

void require_normalized(double mass) {
  if (std::abs(mass - 1.0) > kNormalizedTol) throw DomainError("estimators need a normalized distribution");
}

}  // namespace

double LevelSetDistribution::total_mass() const {
  double s = 0.0;
  for (const Level& l : levels) s += l.value * static_cast<double>(l.count);
  return s;
}

std::int64_t LevelSetDistribution::elements() const {
  std::int64_t s = 0;
  for (const Level& l : levels) s += l.count;
  return s;
}

LevelSetDistribution LevelSetDistribution::from_levels(std::vector<Level> levels) {
  std::map<double, std::int64_t, std::greater<>> merged;
  for (const Level& l : levels) {
    if (l.count < 0 || !(l.value >= 0.0) || !std::isfinite(l.value)) throw InvalidInput("levels need finite values >= 0 and counts >= 0");
    if (l.count == 0 || l.value == 0.0) continue;
    merged[l.value] += l.count;
  }
  LevelSetDistribution out;
  for (const auto& [v, c] : merged) out.levels.push_back({v, c});
  return out;
}

double TupleLevelSetDistribution::total_mass(int k) const {
  double s = 0.0;
  for (const TupleLevel& l : levels) s += l.values[static_cast<std::size_t>(k)] * static_cast<double>(l.count);
  return s;
}

std::int64_t TupleLevelSetDistribution::elements() const {
  std::int64_t s = 0;
  for (const TupleLevel& l : levels) s += l.count;
  return s;
}

TupleLevelSetDistribution TupleLevelSetDistribution::from_levels(int dims, std::vector<TupleLevel> levels) {
  if (dims < 1) throw InvalidInput("tuple levels need at least one coordinate");
  std::map<std::vector<double>, std::int64_t, std::greater<>> merged;
  for (const TupleLevel& l : levels) {
    if (static_cast<int>(l.values.size()) != dims) throw InvalidInput("tuple level has the wrong number of coordinates");
    if (l.count < 0) throw InvalidInput("tuple level counts must be >= 0");
    bool any = false;
    for (double v : l.values) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("tuple level values must be finite and >= 0");
      any = any || v > 0.0;
    }
    if (l.count == 0 || !any) continue;
    merged[l.values] += l.count;
  }
  TupleLevelSetDistribution out;
  out.dims = dims;
  for (const auto& [v, c] : merged) out.levels.push_back({v, c});
  return out;
}

LevelSetDistribution TupleLevelSetDistribution::coordinate(int k) const {
  std::vector<Level> out;
  for (const TupleLevel& l : levels) out.push_back({l.values[static_cast<std::size_t>(k)], l.count});
  return LevelSetDistribution::from_levels(std::move(out));
}

TupleLevelSetDistribution tuple_pseudo_from_assignment(const RoundedSolution& r) {
  const FeasibleSetSpec& s = r.spec_ext;
  std::vector<TupleLevel> out;
  for (int i = 0; i < s.rows(); ++i) {
    const double count = r.X.row(i).sum();
    if (count <= 0.0) continue;
    TupleLevel l;
    for (int k = 0; k < s.dims; ++k) l.values.push_back(s.level_values(i, k));
    l.count = static_cast<std::int64_t>(std::llround(count));
    out.push_back(std::move(l));
  }
  return TupleLevelSetDistribution::from_levels(s.dims, std::move(out));
}

LevelSetDistribution pseudo_from_assignment(const RoundedSolution& r) {
  if (r.spec_ext.dims != 1) throw InvalidInput("use the tuple form for multidimensional assignments");
  return tuple_pseudo_from_assignment(r).coordinate(0);
}

LevelSetDistribution normalize(const LevelSetDistribution& q) {
  const double mass = q.total_mass();
  if (!(mass > 0.0)) throw DomainError("cannot normalize a distribution with zero mass");
  LevelSetDistribution out = q;
  for (Level& l : out.levels) l.value /= mass;
  return out;
}

TupleLevelSetDistribution normalize(const TupleLevelSetDistribution& q) {
  TupleLevelSetDistribution out = q;
  for (int k = 0; k < q.dims; ++k) {
    const double mass = q.total_mass(k);
    if (!(mass > 0.0)) throw DomainError("cannot normalize a coordinate with zero mass");
    for (TupleLevel& l : out.levels) l.values[static_cast<std::size_t>(k)] /= mass;
  }
  return out;
}

double entropy(const LevelSetDistribution& p) {
  require_normalized(p.total_mass());
  double h = 0.0;
  for (const Level& l : p.levels) h -= static_cast<double>(l.count) * xlogx(l.value);
  return h;
}

std::int64_t support_size(const LevelSetDistribution& p) {
  require_normalized(p.total_mass());
  return p.elements();
}

double support_coverage(const LevelSetDistribution& p, std::int64_t m) {
  require_normalized(p.total_mass());
  if (m < 0) throw InvalidInput("coverage needs m >= 0");
  double s = 0.0;
  for (const Level& l : p.levels) {
    // 1 - (1 - v)^m without cancellation for small v.
    const double seen = l.value >= 1.0 ? (m > 0 ? 1.0 : 0.0) : -std::expm1(static_cast<double>(m) * std::log1p(-l.value));
    s += static_cast<double>(l.count) * seen;
  }
  return s;
}

double distance_to_uniformity(const LevelSetDistribution& p, std::int64_t k) {
  require_normalized(p.total_mass());
  const std::int64_t support = p.elements();
  if (k < 1 || k < support) throw DomainError("uniformity domain must be at least the support size");
  const double u = 1.0 / static_cast<double>(k);
  double s = 0.0;
  for (const Level& l : p.levels) s += static_cast<double>(l.count) * std::abs(l.value - u);
  return s + static_cast<double>(k - support) * u;
}

double kl_plugin(const TupleLevelSetDistribution& p) {
  if (p.dims != 2) throw InvalidInput("KL divergence needs a two-coordinate distribution");
  require_normalized(p.total_mass(0));
  require_normalized(p.total_mass(1));
  double s = 0.0;
  for (const TupleLevel& l : p.levels) {
    const double a = l.values[0], b = l.values[1];
    if (a == 0.0) continue;
    if (b == 0.0) throw DomainError("KL divergence is infinite: second coordinate has zero mass where the first does not");
    s += static_cast<double>(l.count) * a * std::log(a / b);
  }
  return s;
}

}  // namespace pml
