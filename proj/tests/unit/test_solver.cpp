#include <cmath>
#include <random>

#include "doctest.h"
#include "pml/errors.hpp"
#include "pml/solver.hpp"
#include "test_support.hpp"

using namespace pml;
using pml::testing::prof;

namespace {

FeasibleSetSpec grid_spec(const Profile& phi, double eps1, double eps2) {
  return FeasibleSetSpec::from_grids(discretize_profile(phi, FrequencyGrid::build(phi.n(), eps2)),
                                     ProbabilityGrid::build(phi.n(), eps1));
}

double inner(const AssignmentMatrix& A, const AssignmentMatrix& B) { return (A.array() * B.array()).sum(); }

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("lmo hand examples") {
    const FeasibleSetSpec s = grid_spec(prof({{1, 1}}), 1.0, 1.0);
    const AssignmentMatrix zero = AssignmentMatrix::Zero(s.rows(), s.cols());
    const LmoResult z = lmo(zero, s);
    CHECK(z.value == doctest::Approx(0.0));
    CHECK(is_feasible(z.S, s, 1e-12));

    AssignmentMatrix G = AssignmentMatrix::Constant(s.rows(), s.cols(), -1.0);
    G(1, 1) = 2.0;
    G(0, 1) = 1.0;
    const LmoResult a = lmo(G, s);
    CHECK(a.S(1, 1) == doctest::Approx(1.0));
    CHECK(a.value == doctest::Approx(2.0));

    AssignmentMatrix H = AssignmentMatrix::Constant(s.rows(), s.cols(), -1.0);
    H(0, 1) = 0.0;
    H(0, 0) = 3.0;
    const LmoResult b = lmo(H, s);
    // Budget left after the seen element goes entirely to unseen mass on row 0.
    const double left = 1.0 - s.level_values(0, 0);
    CHECK(b.S(0, 0) == doctest::Approx(left / s.level_values(0, 0)));
    CHECK(b.value == doctest::Approx(3.0 * left / s.level_values(0, 0)));
  }

  TEST_CASE("lmo is optimal, feasible and splits at most one column") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> nd(0.0, 2.0);
    const FeasibleSetSpec s = grid_spec(prof({{3, 2}, {2, 1}, {1, 3}}), 0.6, 0.6);
    for (int rep = 0; rep < 200; ++rep) {
      AssignmentMatrix G(s.rows(), s.cols());
      for (int i = 0; i < G.rows(); ++i)
        for (int j = 0; j < G.cols(); ++j) G(i, j) = nd(rng);
      const LmoResult r = lmo(G, s);
      CHECK(is_feasible(r.S, s, 1e-9));
      CHECK(r.value == doctest::Approx(inner(G, r.S)).epsilon(1e-9));
      CHECK(r.upper_bound >= r.value - 1e-9);
      CHECK(r.upper_bound - r.value <= 1e-6 * std::max(1.0, std::abs(r.value)));
      int split = 0;
      for (int j = 1; j < s.cols(); ++j) {
        int nz = 0;
        for (int i = 0; i < s.rows(); ++i) nz += r.S(i, j) > 1e-12;
        split += nz > 1;
        CHECK(nz <= 2);
      }
      CHECK(split <= 1);
      // No random feasible point does better.
      for (int t = 0; t < 5; ++t) {
        const AssignmentMatrix X = pml::testing::random_fractional_point(rng, s);
        if (is_feasible(X, s, 1e-9)) CHECK(inner(G, X) <= r.value + 1e-9);
      }
    }
  }

  TEST_CASE("initial point examples") {
    const FeasibleSetSpec empty = FeasibleSetSpec::make(Eigen::MatrixXd::Constant(2, 1, 0.5), Eigen::MatrixXd::Zero(2, 1),
                                                        Eigen::VectorXd::Zero(2), SetVariant::kFractional);
    CHECK(initial_point(empty).cwiseAbs().maxCoeff() == 0.0);

    const FeasibleSetSpec s = grid_spec(prof({{1, 2}}), 1.0, 1.0);
    const AssignmentMatrix X = initial_point(s);
    int half = -1;
    for (int i = 0; i < s.rows(); ++i)
      if (s.level_values(i, 0) == 0.5) half = i;
    REQUIRE(half >= 0);
    CHECK(X(half, 1) == doctest::Approx(2.0));
    CHECK(budget(X, s, 0) == doctest::Approx(1.0));
    CHECK(X.col(0).cwiseAbs().maxCoeff() == 0.0);

    // A profile that needs shifting down still lands on the budget.
    const FeasibleSetSpec t = grid_spec(prof({{2, 1}, {1, 3}}), 0.9, 1.0);
    const AssignmentMatrix Y = initial_point(t);
    CHECK(is_feasible(Y, t, 1e-12));
    CHECK(budget(Y, t, 0) <= 1.0 + 1e-12);
  }

  TEST_CASE("point mass profile certifies and beats the hand-built point") {
    const Profile phi = prof({{4, 1}});
    const FeasibleSetSpec s = grid_spec(phi, 0.5, 0.5);
    const SolveResult r = maximize_g(s, SolverConfig::defaults(s));
    CHECK(r.certified);
    CHECK(r.certified_gap <= SolverConfig::defaults(s).delta);
    CHECK(is_feasible(r.X, s, 1e-9));
    AssignmentMatrix P = AssignmentMatrix::Zero(s.rows(), s.cols());
    P(s.rows() - 1, s.cols() - 1) = 1.0;
    CHECK(r.objective >= log_g(P, s) - 1e-12);
    CHECK(r.objective == doctest::Approx(log_g(r.X, s)));
  }

  TEST_CASE("solver dominates every enumerated integral point") {
    for (const Profile& phi : {prof({{1, 2}}), prof({{2, 1}, {1, 1}}), prof({{1, 3}}), prof({{3, 1}})}) {
      const FeasibleSetSpec s = grid_spec(phi, 1.0, 1.0);
      const SolverConfig cfg = SolverConfig::defaults(s);
      const SolveResult r = maximize_g(s, cfg);
      CHECK(r.certified);
      double best = kNegInf;
      for_each_integral_K(s, {}, [&](const AssignmentMatrix& X) { best = std::max(best, log_g(X, s)); });
      CHECK(r.objective >= best - cfg.delta);
      // The gap certificate is a valid bound.
      CHECK(r.objective + r.certified_gap >= best - 1e-12);
      CHECK(r.objective >= log_g(initial_point(s), s) - 1e-12);
    }
  }

  TEST_CASE("solver output is deterministic") {
    const FeasibleSetSpec s = grid_spec(prof({{5, 1}, {2, 3}, {1, 6}}), 0.4, 0.4);
    const SolveResult a = maximize_g(s, SolverConfig::defaults(s)), b = maximize_g(s, SolverConfig::defaults(s));
    CHECK(a.X == b.X);
    CHECK(a.objective == b.objective);
    CHECK(a.certified_gap == b.certified_gap);
  }

  TEST_CASE("iteration limit flags the result instead of throwing") {
    const FeasibleSetSpec s = grid_spec(prof({{5, 1}, {2, 3}, {1, 6}}), 0.4, 0.4);
    SolverConfig cfg = SolverConfig::defaults(s);
    cfg.max_iters = 1;
    cfg.delta = 1e-14;
    const SolveResult r = maximize_g(s, cfg);
    CHECK(is_feasible(r.X, s, 1e-9));
    CHECK(r.certified_gap >= 0.0);
  }

  TEST_CASE("medium instance certifies") {
    std::vector<ProfileEntry> pairs;
    for (int f = 1; f <= 30; ++f) pairs.push_back({f, 1 + (37 * f) % 11});
    const Profile phi = prof(pairs);
    const double e = std::pow(static_cast<double>(phi.n()), -1.0 / 3.0);
    const FeasibleSetSpec s = grid_spec(phi, e, e);
    const SolveResult r = maximize_g(s, SolverConfig::defaults(s));
    CHECK(r.certified);
    CHECK(is_feasible(r.X, s, 1e-9));
  }

  TEST_CASE("bad configurations are rejected") {
    const FeasibleSetSpec s = grid_spec(prof({{1, 1}}), 1.0, 1.0);
    SolverConfig cfg;
    cfg.delta = 0.0;
    CHECK_THROWS_AS(maximize_g(s, cfg), InvalidInput);
  }
}
