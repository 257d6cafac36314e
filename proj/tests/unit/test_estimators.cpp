#include <cmath>

#include "doctest.h"
#include "pml/errors.hpp"
#include "pml/estimators.hpp"

using namespace pml;

namespace {

LevelSetDistribution L(std::vector<Level> v) { return LevelSetDistribution::from_levels(std::move(v)); }

TupleLevelSetDistribution P(std::vector<TupleLevel> v) { return TupleLevelSetDistribution::from_levels(2, std::move(v)); }

}  // namespace

TEST_SUITE("estimators") {
  TEST_CASE("level sets merge, sort and drop empties") {
    const LevelSetDistribution d = L({{0.25, 1}, {0.5, 1}, {0.25, 1}, {0.1, 0}});
    REQUIRE(d.levels.size() == 2);
    CHECK(d.levels[0] == Level{0.5, 1});
    CHECK(d.levels[1] == Level{0.25, 2});
    CHECK(d.total_mass() == 1.0);
    CHECK(d.elements() == 3);
    CHECK_THROWS_AS(L({{-0.1, 1}}), InvalidInput);
  }

  TEST_CASE("pseudo-distribution from a rounded assignment") {
    Eigen::MatrixXd Lv(2, 1), F = Eigen::MatrixXd::Zero(2, 1);
    Lv << 0.5, 0.25;
    F(1, 0) = 1;
    Eigen::VectorXd T = Eigen::VectorXd::Zero(2);
    T(1) = 1;
    const FeasibleSetSpec s = FeasibleSetSpec::make(Lv, F, T, SetVariant::kFractional);
    AssignmentMatrix X = AssignmentMatrix::Zero(2, 2);
    X(0, 1) = X(1, 1) = 0.5;
    const LevelSetDistribution q = pseudo_from_assignment(round_assignment(X, s));
    REQUIRE(q.levels.size() == 1);
    CHECK(q.levels[0].value == doctest::Approx(0.375));
    CHECK(q.levels[0].count == 1);
    const LevelSetDistribution n = normalize(q);
    CHECK(n.levels[0].value == doctest::Approx(1.0));

    X.setZero();
    T(1) = 0;
    const FeasibleSetSpec empty = FeasibleSetSpec::make(Lv, F, T, SetVariant::kFractional);
    CHECK(pseudo_from_assignment(round_assignment(X, empty)).levels.empty());

    T(1) = 2;
    const FeasibleSetSpec two = FeasibleSetSpec::make(Lv, F, T, SetVariant::kFractional);
    X(0, 1) = 2;
    const LevelSetDistribution q2 = pseudo_from_assignment(round_assignment(X, two));
    REQUIRE(q2.levels.size() == 1);
    CHECK(q2.levels[0] == Level{0.5, 2});
    CHECK(q2.total_mass() == 1.0);
  }

  TEST_CASE("normalize") {
    CHECK(normalize(L({{0.5, 2}})) == L({{0.5, 2}}));
    CHECK(normalize(L({{0.25, 2}})).levels[0].value == doctest::Approx(0.5));
    CHECK_THROWS_AS(normalize(L({})), DomainError);
  }

  TEST_CASE("entropy") {
    for (int k = 1; k <= 100; ++k) CHECK(std::abs(entropy(L({{1.0 / k, k}})) - std::log(k)) <= 1e-12);
    CHECK(entropy(L({{1.0, 1}})) == 0.0);
    CHECK(entropy(L({{0.5, 1}, {0.25, 2}})) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(4.0)));
    CHECK_THROWS_AS(entropy(L({{0.25, 2}})), DomainError);
  }

  TEST_CASE("support and coverage") {
    CHECK(support_size(L({{0.5, 1}, {0.25, 2}})) == 3);
    CHECK(support_coverage(L({{1.0, 1}}), 1) == 1.0);
    CHECK(support_coverage(L({{1.0, 1}}), 50) == 1.0);
    CHECK(support_coverage(L({{0.5, 2}}), 2) == doctest::Approx(2 * 0.75));
    CHECK(support_coverage(L({{0.5, 2}}), 0) == 0.0);
  }

  TEST_CASE("distance to uniformity") {
    for (int k = 1; k <= 20; ++k) CHECK(distance_to_uniformity(L({{1.0 / k, k}}), k) == doctest::Approx(0.0));
    CHECK(distance_to_uniformity(L({{0.5, 2}}), 4) == doctest::Approx(1.0));
    CHECK_THROWS_AS(distance_to_uniformity(L({{0.5, 2}}), 1), DomainError);
  }

  TEST_CASE("KL plug-in") {
    CHECK(kl_plugin(P({{{0.5, 0.5}, 2}})) == 0.0);
    CHECK(kl_plugin(P({{{0.25, 0.25}, 2}, {{0.5, 0.5}, 1}})) == 0.0);
    CHECK(kl_plugin(P({{{0.5, 0.25}, 1}, {{0.5, 0.75}, 1}})) ==
          doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)));
    CHECK(kl_plugin(P({{{0.0, 0.5}, 1}, {{1.0, 0.5}, 1}})) == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(kl_plugin(P({{{0.5, 0.0}, 1}, {{0.5, 1.0}, 1}})), DomainError);
  }

  TEST_CASE("tuple distributions normalize per coordinate") {
    const TupleLevelSetDistribution q = P({{{0.2, 0.1}, 2}, {{0.1, 0.3}, 1}});
    const TupleLevelSetDistribution n = normalize(q);
    CHECK(n.total_mass(0) == doctest::Approx(1.0));
    CHECK(n.total_mass(1) == doctest::Approx(1.0));
    CHECK(n.coordinate(1).elements() == 3);
  }
}
