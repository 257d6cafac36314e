#include <cmath>
#include <random>

#include "doctest.h"
#include "pml/errors.hpp"
#include "pml/exact_oracle.hpp"
#include "test_support.hpp"

using namespace pml;
using pml::testing::prof;

TEST_SUITE("exact_oracle") {
  TEST_CASE("sequence probabilities") {
    TypeVector t;
    t.counts = {{0, 1}, {1, 1}};
    t.n = 2;
    CHECK(exact_sequence_logprob({{0.5, 0.5}}, t).value == doctest::Approx(std::log(0.25)));
    t.counts = {{0, 4}};
    t.n = 4;
    CHECK(exact_sequence_logprob({{1.0}}, t).value == doctest::Approx(0.0));
    t.counts = {{0, 2}, {1, 1}};
    t.n = 3;
    CHECK(exact_sequence_logprob({{0.6, 0.4}}, t).value == doctest::Approx(std::log(0.144)));
    t.counts = {{3, 1}};
    t.n = 1;
    CHECK_THROWS_AS(exact_sequence_logprob({{0.6, 0.4}}, t), InvalidInput);
  }

  TEST_CASE("profile probabilities by enumeration") {
    // ab, ba out of the four length-2 sequences.
    CHECK(exact_profile_logprob({{0.5, 0.5}}, prof({{1, 2}})).value == doctest::Approx(std::log(0.5)));
    CHECK(exact_profile_logprob({{0.5, 0.5}}, prof({{2, 1}})).value == doctest::Approx(std::log(0.5)));
    CHECK(exact_profile_logprob({{1.0}}, prof({{7, 1}})).value == doctest::Approx(0.0));
    CHECK(exact_profile_logprob({{1.0}}, prof({{1, 2}})).is_zero());
  }

  TEST_CASE("size guards") {
    CHECK_THROWS_AS(exact_profile_logprob({{1.0}}, prof({{13, 1}})), GuardExceeded);
    CHECK_THROWS_AS(exact_profile_logprob({std::vector<double>(11, 1.0 / 11)}, prof({{1, 1}})), GuardExceeded);
  }

  TEST_CASE("type and sequence enumeration agree") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 60; ++rep) {
      const int n = 1 + static_cast<int>(rng() % 5), a = 1 + static_cast<int>(rng() % 4);
      const DenseDistribution p = pml::testing::random_distribution(rng, a);
      const Profile phi = profile_of_sequence(pml::testing::random_sequence(rng, n, a));
      const double x = exact_profile_logprob(p, phi).value, y = exact_profile_logprob_by_sequences(p, phi).value;
      CHECK(std::abs(x - y) <= 1e-12);
    }
  }

  TEST_CASE("scaling a pseudo-distribution shifts by n log s") {
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 40; ++rep) {
      const int n = 1 + static_cast<int>(rng() % 6), a = 1 + static_cast<int>(rng() % 4);
      const DenseDistribution p = pml::testing::random_distribution(rng, a);
      const Profile phi = profile_of_sequence(pml::testing::random_sequence(rng, n, a));
      const double s = 0.3 + 0.7 * std::uniform_real_distribution<double>(0, 1)(rng);
      DenseDistribution q = p;
      for (double& v : q.probs) v *= s;
      const double lp = exact_profile_logprob(p, phi).value;
      if (lp == kNegInf) continue;
      CHECK(exact_profile_logprob(q, phi).value == doctest::Approx(lp + n * std::log(s)).epsilon(1e-12));
    }
  }

  TEST_CASE("brute force examples") {
    CHECK(brute_force_pml(prof({{2, 1}}), GridSearchConfig::defaults(prof({{2, 1}}))).logprob.value == doctest::Approx(0.0));
    CHECK(brute_force_pml(prof({{5, 1}}), GridSearchConfig::defaults(prof({{5, 1}}))).logprob.value == doctest::Approx(0.0));
    for (int S = 1; S <= 6; ++S) {
      GridSearchConfig cfg{S, 60, 2};
      const BruteForceResult r = brute_force_pml(prof({{1, 2}}), cfg);
      if (S == 1) {
        CHECK(r.logprob.is_zero());
      } else {
        CHECK(r.logprob.value == doctest::Approx(std::log(1.0 - 1.0 / S)));
      }
    }
  }

  TEST_CASE("brute force is monotone in support cap and in nested resolutions") {
    for (const Profile& phi : {prof({{2, 2}, {1, 1}}), prof({{1, 3}}), prof({{3, 1}, {1, 2}})}) {
      double prev = kNegInf;
      for (int S = 1; S <= 5; ++S) {
        const double v = brute_force_pml(phi, {S, 12, phi.n()}).logprob.value;
        CHECK(v >= prev - 1e-12);
        prev = v;
      }
      prev = kNegInf;
      for (int res : {3, 6, 12, 24}) {
        const double v = brute_force_pml(phi, {4, res, phi.n()}).logprob.value;
        CHECK(v >= prev - 1e-12);
        prev = v;
      }
    }
  }

  TEST_CASE("grouped evaluation matches the dense oracle") {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 40; ++rep) {
      const int n = 1 + static_cast<int>(rng() % 7);
      const Profile phi = profile_of_sequence(pml::testing::random_sequence(rng, n, 4));
      // Two or three groups with repeated values.
      std::vector<LevelGroup> groups;
      DenseDistribution dense;
      const int G = 1 + static_cast<int>(rng() % 3);
      double total = 0.0;
      std::vector<std::pair<double, int>> raw;
      for (int g = 0; g < G; ++g) {
        const double v = 0.1 + std::uniform_real_distribution<double>(0, 1)(rng);
        const int c = 1 + static_cast<int>(rng() % 3);
        raw.push_back({v, c});
        total += v * c;
      }
      for (auto [v, c] : raw) {
        groups.push_back({{v / total}, c});
        for (int i = 0; i < c; ++i) dense.probs.push_back(v / total);
      }
      std::vector<FrequencyClass> classes;
      for (const auto& e : phi.pairs()) classes.push_back({{e.frequency}, e.count});
      const double a = exact_grouped_logprob(groups, classes).value, b = exact_profile_logprob(dense, phi).value;
      if (b == kNegInf) {
        CHECK(a == kNegInf);
      } else {
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
      }
      CHECK(log_c_classes(classes) == doctest::Approx(log_c_phi(phi)));
    }
  }
}
