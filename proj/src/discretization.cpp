#include "pml/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pml/errors.hpp"

namespace pml {

namespace {

// Values within 1e-9 of an integer are treated as that integer, so exact
// ladder points never get pushed one step by rounding noise.
constexpr double kSnap = 1e-9;

std::int64_t snapped_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= kSnap) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(x));
}

void check_eps(double eps, const char* name) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput(std::string(name) + " must lie in (0, 1]");
}

}  // namespace

ProbabilityGrid ProbabilityGrid::build(std::int64_t n, double eps) {
  check_eps(eps, "eps1");
  if (n < 1) throw InvalidInput("probability grid needs n >= 1");
  const double log_base = std::log1p(eps);
  const double target = std::log(2.0 * static_cast<double>(n) * static_cast<double>(n));
  // Smallest depth t with t*log(1+eps) >= log(2n^2); b1 = t + 1.
  const std::int64_t depth = snapped_ceil(target / log_base);
  return from_exponents(eps, depth);
}

ProbabilityGrid ProbabilityGrid::from_exponents(double eps, std::int64_t depth) {
  check_eps(eps, "eps1");
  if (depth < 0 || depth > 1'000'000) throw InvalidInput("probability grid depth out of range");
  ProbabilityGrid g;
  g.eps_ = eps;
  g.log_base_ = std::log1p(eps);
  g.b1_ = static_cast<int>(depth) + 1;
  return g;
}

std::vector<int> ProbabilityGrid::exponents() const {
  std::vector<int> e(static_cast<std::size_t>(b1_));
  for (int i = 0; i < b1_; ++i) e[static_cast<std::size_t>(i)] = exponent(i);
  return e;
}

std::optional<int> ProbabilityGrid::floor_index(double c) const {
  if (!(c > 0.0)) return std::nullopt;
  if (c >= 1.0) return b1_ - 1;
  const std::int64_t t = snapped_ceil(-std::log(c) / log_base_);
  if (t > b1_ - 1) return std::nullopt;
  return static_cast<int>(b1_ - 1 - t);
}

FrequencyGrid FrequencyGrid::build(std::int64_t n, double eps) {
  check_eps(eps, "eps2");
  if (n < 1) throw InvalidInput("frequency grid needs n >= 1");
  std::set<std::int64_t> vals;
  const std::int64_t top = std::min<std::int64_t>(snapped_ceil(1.0 / eps), n);
  for (std::int64_t v = 1; v <= top; ++v) vals.insert(v);
  const double ratio = 1.0 + eps / 2.0;
  for (int k = 1;; ++k) {
    const std::int64_t v = snapped_ceil(std::pow(ratio, k));
    if (v >= n) break;
    vals.insert(v);
  }
  vals.insert(n);
  FrequencyGrid g;
  g.eps_ = eps;
  g.n_ = n;
  g.values_.assign(vals.begin(), vals.end());
  return g;
}

int FrequencyGrid::ceil_index(std::int64_t f) const {
  if (f < 1 || f > n_) throw InvalidInput("frequency " + std::to_string(f) + " outside [1, n]");
  auto it = std::lower_bound(values_.begin(), values_.end(), f);
  return static_cast<int>(it - values_.begin());
}

double DiscretePseudoDistribution::mass() const {
  double s = 0.0;
  for (const auto& [i, c] : level_counts) s += static_cast<double>(c) * grid.value(i);
  return s;
}

DenseDistribution DiscretePseudoDistribution::to_dense() const {
  DenseDistribution p;
  // Largest values first, matching the nonincreasing convention of the oracle.
  for (auto it = level_counts.rbegin(); it != level_counts.rend(); ++it)
    for (std::int64_t c = 0; c < it->second; ++c) p.probs.push_back(grid.value(it->first));
  return p;
}

Profile DiscreteProfile::to_profile() const {
  std::vector<ProfileEntry> pairs;
  for (int j = 0; j < grid.size(); ++j)
    if (counts[static_cast<std::size_t>(j)] > 0) pairs.push_back({grid.value(j), counts[static_cast<std::size_t>(j)]});
  return Profile::from_pairs(std::move(pairs));
}

DiscretePseudoDistribution disc(const DenseDistribution& p, const ProbabilityGrid& grid) {
  DiscretePseudoDistribution q;
  q.grid = grid;
  for (double v : p.probs) {
    if (!(v >= 0.0) || v > 1.0 + 1e-12) throw InvalidInput("probabilities must lie in [0, 1]");
    if (v == 0.0) continue;
    if (auto idx = grid.floor_index(v)) {
      ++q.level_counts[*idx];
    } else {
      q.dropped_mass += v;
    }
  }
  return q;
}

DiscreteProfile discretize_profile(const Profile& phi, const FrequencyGrid& grid) {
  DiscreteProfile dp;
  dp.grid = grid;
  dp.counts.assign(static_cast<std::size_t>(grid.size()), 0);
  for (const auto& e : phi.pairs()) {
    if (e.frequency > grid.n()) throw InvalidInput("profile frequency exceeds the frequency grid maximum");
    const int j = grid.ceil_index(e.frequency);
    dp.counts[static_cast<std::size_t>(j)] += e.count;
    dp.n_prime += grid.value(j) * e.count;
  }
  return dp;
}

}  // namespace pml
