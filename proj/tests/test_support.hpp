#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pml/exact_oracle.hpp"
#include "pml/sdpml.hpp"

namespace pml::testing {

inline Profile prof(std::vector<ProfileEntry> pairs) { return Profile::from_pairs(std::move(pairs)); }

// Random distribution on `support` elements (some entries may be tiny).
inline DenseDistribution random_distribution(std::mt19937_64& rng, int support) {
  std::exponential_distribution<double> e(1.0);
  DenseDistribution p;
  double s = 0.0;
  for (int i = 0; i < support; ++i) {
    p.probs.push_back(e(rng));
    s += p.probs.back();
  }
  for (double& v : p.probs) v /= s;
  return p;
}

inline Sequence random_sequence(std::mt19937_64& rng, int n, int alphabet) {
  std::uniform_int_distribution<int> u(0, alphabet - 1);
  Sequence s;
  for (int i = 0; i < n; ++i) s.symbols.push_back(u(rng));
  return s;
}

// Random feasible point of the fractional set: each column spread over
// random rows, rescaled onto the budget by moving mass to the lowest level.
inline AssignmentMatrix random_fractional_point(std::mt19937_64& rng, const FeasibleSetSpec& spec) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int R = spec.rows(), C = spec.cols();
  AssignmentMatrix X = AssignmentMatrix::Zero(R, C);
  int low = 0;
  for (int i = 1; i < R; ++i)
    if (spec.level_values(i, 0) < spec.level_values(low, 0)) low = i;
  for (int j = 1; j < C; ++j) {
    if (spec.targets(j) <= 0.0) continue;
    std::vector<double> w(static_cast<std::size_t>(R));
    double s = 0.0;
    for (double& v : w) s += (v = u(rng));
    for (int i = 0; i < R; ++i) X(i, j) = spec.targets(j) * w[static_cast<std::size_t>(i)] / s;
  }
  for (int k = 0; k < spec.dims; ++k) {
    double b = budget(X, spec, k);
    for (int it = 0; b > 1.0 && it < 200; ++it) {
      const double t = u(rng);
      // Pull every seen entry partly down to the lowest row.
      for (int j = 1; j < C; ++j)
        for (int i = 0; i < R; ++i)
          if (i != low) {
            const double moved = X(i, j) * (0.5 + 0.5 * t);
            X(i, j) -= moved;
            X(low, j) += moved;
          }
      b = budget(X, spec, k);
    }
  }
  // Spend part of the remaining budget on unseen elements in a random row.
  double room = 1.0;
  const int r = std::uniform_int_distribution<int>(0, R - 1)(rng);
  for (int k = 0; k < spec.dims; ++k) room = std::min(room, (1.0 - budget(X, spec, k)) / spec.level_values(r, k));
  if (room > 0.0) X(r, 0) += 0.5 * u(rng) * room;
  return X;
}

}  // namespace pml::testing
