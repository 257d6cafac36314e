#include <cmath>
#include <random>

#include "doctest.h"
#include "pml/errors.hpp"
#include "pml/multipml.hpp"
#include "test_support.hpp"

using namespace pml;
using pml::testing::prof;

TEST_SUITE("multipml") {
  TEST_CASE("d-profiles count joint frequency tuples") {
    const DProfile dp = d_profile_of_chars({"ab", "aa"});
    CHECK(dp.d == 2);
    CHECK(dp.entries.size() == 2);
    CHECK(dp.entries.at({1, 2}) == 1);
    CHECK(dp.entries.at({1, 0}) == 1);
    CHECK(dp.n == std::vector<std::int64_t>{2, 2});

    const DProfile same = d_profile_of_chars({"aab", "aab"});
    for (const auto& [t, c] : same.entries) CHECK(t[0] == t[1]);

    const DProfile one = d_profile_of_chars({"ababc"});
    CHECK(one.to_profile() == prof({{2, 2}, {1, 1}}));
    CHECK_THROWS_AS(d_profile_of_chars({"a", "b", "c", "d"}), InvalidInput);
    CHECK_THROWS_AS(d_profile_of_chars({"a", ""}), InvalidInput);
    CHECK_THROWS_AS(DProfile::from_entries(2, {{{0, 0}, 1}}), InvalidInput);
  }

  TEST_CASE("d = 1 matches the one-dimensional pipeline bit for bit") {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 8; ++rep) {
      const int n = 1 + static_cast<int>(rng() % 40);
      const Sequence s = pml::testing::random_sequence(rng, n, 1 + static_cast<int>(rng() % 10));
      const Profile phi = profile_of_sequence(s);
      std::map<std::vector<std::int64_t>, std::int64_t> e;
      for (const auto& p : phi.pairs()) e[{p.frequency}] = p.count;
      const DProfile dp = DProfile::from_entries(1, e);
      const double eps = default_eps(n);
      CHECK(default_eps_d(dp)[0] == eps);
      const PmlResult a = approximate_pml(phi, eps, eps);
      const PmlResultD b = approximate_pml_d(dp, {eps}, {eps});
      CHECK(b.distribution.coordinate(0) == a.distribution);
      CHECK(b.diagnostics.delta_total == a.diagnostics.delta_total);
      CHECK(b.diagnostics.log_w_rounded == a.diagnostics.log_w_rounded);
    }
  }

  TEST_CASE("product feasible set reduces to the 1-d grids") {
    const Profile phi = prof({{3, 1}, {1, 2}});
    const DProfile dp = DProfile::from_entries(1, {{{3}, 1}, {{1}, 2}});
    const DGrids g = DGrids::build(dp.n, {0.5}, {0.5});
    const FeasibleSetSpec a = product_spec(discretize_d_profile(dp, g), g);
    const FeasibleSetSpec b = FeasibleSetSpec::from_grids(discretize_profile(phi, FrequencyGrid::build(5, 0.5)), ProbabilityGrid::build(5, 0.5));
    CHECK(a.coef == b.coef);
    CHECK(a.targets == b.targets);
    CHECK(a.level_values == b.level_values);
    CHECK(a.ladder == b.ladder);
  }

  TEST_CASE("product grids") {
    const DGrids g = DGrids::build({3, 4}, {1.0, 0.5}, {1.0, 1.0});
    CHECK(g.rows() == g.plevel[0].size() * g.plevel[1].size());
    const std::vector<double> last = g.level(g.rows() - 1);
    CHECK(last == std::vector<double>{1.0, 1.0});
    const std::vector<double> first = g.level(0);
    CHECK(first[0] <= 1.0 / 18);
    CHECK(first[1] <= 1.0 / 32);
  }

  TEST_CASE("d-oracle examples") {
    const DProfile ab = d_profile_of_chars({"ab", "ab"});
    const DenseDistribution u{{0.5, 0.5}};
    // Each coordinate must be a permutation of "ab", independently: 1/2 * 1/2.
    CHECK(exact_d_profile_logprob({u, u}, ab).value == doctest::Approx(std::log(0.25)));
    const DenseDistribution pt{{1.0}};
    CHECK(exact_d_profile_logprob({pt, pt}, d_profile_of_chars({"aa", "aa"})).value == doctest::Approx(0.0));

    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 30; ++rep) {
      const Sequence s = pml::testing::random_sequence(rng, 1 + static_cast<int>(rng() % 6), 3);
      const Profile phi = profile_of_sequence(s);
      std::map<std::vector<std::int64_t>, std::int64_t> e;
      for (const auto& p : phi.pairs()) e[{p.frequency}] = p.count;
      const DenseDistribution p = pml::testing::random_distribution(rng, 1 + static_cast<int>(rng() % 4));
      const double a = exact_d_profile_logprob({p}, DProfile::from_entries(1, e)).value, b = exact_profile_logprob(p, phi).value;
      if (b == kNegInf) {
        CHECK(a == kNegInf);
      } else {
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
      }
    }
    CHECK_THROWS_AS(exact_d_profile_logprob({u, u}, d_profile_of_chars({"aaaaaaa", "a"})), GuardExceeded);
  }

  TEST_CASE("d-oracle agrees with grouped evaluation") {
    std::mt19937_64 rng(43);
    for (int rep = 0; rep < 30; ++rep) {
      const std::string a = "abc", b = "abd";
      std::string s1, s2;
      for (int i = 0; i < 1 + static_cast<int>(rng() % 4); ++i) s1 += a[rng() % 3];
      for (int i = 0; i < 1 + static_cast<int>(rng() % 4); ++i) s2 += b[rng() % 3];
      const DProfile dp = d_profile_of_chars({s1, s2});
      const DenseDistribution p = pml::testing::random_distribution(rng, 4), q = pml::testing::random_distribution(rng, 4);
      std::vector<TupleLevel> levels;
      for (int i = 0; i < 4; ++i) levels.push_back({{p.probs[static_cast<std::size_t>(i)], q.probs[static_cast<std::size_t>(i)]}, 1});
      const double x = exact_d_profile_logprob({p, q}, dp).value;
      const double y = d_profile_logprob_of(TupleLevelSetDistribution::from_levels(2, levels), dp).value;
      CHECK(x == doctest::Approx(y).epsilon(1e-12));
    }
  }

  TEST_CASE("two-dimensional pipeline") {
    const DProfile aa = d_profile_of_chars({"aa", "aa"});
    const PmlResultD r = approximate_pml_d(aa, default_eps_d(aa), default_eps_d(aa));
    REQUIRE(r.distribution.levels.size() == 1);
    CHECK(r.distribution.levels[0].values[0] == doctest::Approx(1.0));
    CHECK(r.distribution.levels[0].values[1] == doctest::Approx(1.0));
    CHECK(d_profile_logprob_of(r.distribution, aa).value >= -r.diagnostics.delta_total);

    const DProfile ab = d_profile_of_chars({"ab", "ab"});
    const PmlResultD s = approximate_pml_d(ab, default_eps_d(ab), default_eps_d(ab));
    for (int k = 0; k < 2; ++k) {
      CHECK(s.diagnostics.pseudo_mass[static_cast<std::size_t>(k)] <= 1.0 + 1e-12);
      CHECK(s.distribution.total_mass(k) == doctest::Approx(1.0));
    }
    const double lp = d_profile_logprob_of(s.distribution, ab).value;
    CHECK(lp >= s.diagnostics.logprob_lower_bound - 1e-9);
    CHECK(lp >= brute_force_pml_d(ab, 3, 12).logprob.value - s.diagnostics.delta_total);
    CHECK(s.diagnostics.slack.min_probability == 12.0);
  }

  TEST_CASE("elements seen in only one coordinate still fit") {
    const DProfile dp = d_profile_of_chars({"abcab", "a"});
    const PmlResultD r = approximate_pml_d(dp, default_eps_d(dp), default_eps_d(dp));
    CHECK(r.diagnostics.certified);
    CHECK(r.distribution.elements() >= 3);
  }

  TEST_CASE("2-d brute force") {
    const DProfile aa = d_profile_of_chars({"aa", "aa"});
    CHECK(brute_force_pml_d(aa, 2, 6).logprob.value == doctest::Approx(0.0));
    const DProfile ab = d_profile_of_chars({"ab", "ab"});
    // 2 p1 p2 * 2 q1 q2 peaks at 1/4 for uniform pairs, which are on the grid.
    CHECK(brute_force_pml_d(ab, 2, 4).logprob.value == doctest::Approx(std::log(0.25)));
  }
}
