#pragma once

#include <cstdint>
#include <vector>

#include "pml/profile.hpp"

namespace pml {

struct DenseDistribution {
  std::vector<double> probs;

  double mass() const;
  std::size_t support() const;
};

inline constexpr std::int64_t kOracleMaxN = 12;
inline constexpr std::size_t kOracleMaxSupport = 10;

struct GridSearchConfig {
  int support_cap = 10;
  int resolution = 24;
  std::int64_t n = 0;

  // support_cap = min(2n^2, 10), resolution 24.
  static GridSearchConfig defaults(const Profile& phi);
};

LogProb exact_sequence_logprob(const DenseDistribution& p, const TypeVector& t);

// Sum over types with the given profile; guarded by n <= 12 and support <= 10.
LogProb exact_profile_logprob(const DenseDistribution& p, const Profile& phi);

// Cross-check path: sums the probability of every sequence over the support
// whose profile is phi. Only for support^n <= 2e7.
LogProb exact_profile_logprob_by_sequences(const DenseDistribution& p, const Profile& phi);

struct BruteForceResult {
  DenseDistribution distribution;
  LogProb logprob;
};

// Best nonincreasing vector with entries in multiples of 1/resolution and at
// most support_cap nonzeros. A lower bound on the PML value.
BruteForceResult brute_force_pml(const Profile& phi, const GridSearchConfig& cfg);

// `count` interchangeable elements that share one probability per coordinate.
struct LevelGroup {
  std::vector<double> probs;
  std::int64_t count = 0;
};

// `count` elements observed with the given frequency per coordinate.
struct FrequencyClass {
  std::vector<std::int64_t> freqs;
  std::int64_t count = 0;
};

// Exact profile probability for a distribution given as level groups, in any
// dimension. Enumerates how many elements of each frequency class land in each
// group; throws GuardExceeded after max_terms leaves.
LogProb exact_grouped_logprob(const std::vector<LevelGroup>& groups,
                              const std::vector<FrequencyClass>& classes,
                              std::uint64_t max_terms = 50'000'000);

// log C for a (possibly multidimensional) profile: sum over coordinates of
// log n(k)! - sum_j count_j log freq_j(k)!.
double log_c_classes(const std::vector<FrequencyClass>& classes);

}  // namespace pml
