#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "doctest.h"
#include "pml/errors.hpp"
#include "pml/sdpml.hpp"
#include "test_support.hpp"

using namespace pml;
using pml::testing::prof;

namespace {

// One-coordinate set with explicit levels, frequencies and targets.
FeasibleSetSpec spec1(std::vector<double> levels, std::vector<double> freqs, std::vector<double> targets) {
  Eigen::MatrixXd L(static_cast<Eigen::Index>(levels.size()), 1), F = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(freqs.size()) + 1, 1);
  Eigen::VectorXd T = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(freqs.size()) + 1);
  for (std::size_t i = 0; i < levels.size(); ++i) L(static_cast<Eigen::Index>(i), 0) = levels[i];
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    F(static_cast<Eigen::Index>(j) + 1, 0) = freqs[j];
    T(static_cast<Eigen::Index>(j) + 1) = targets[j];
  }
  return FeasibleSetSpec::make(L, F, T, SetVariant::kFractional);
}

}  // namespace

TEST_SUITE("sdpml") {
  TEST_CASE("feasibility examples") {
    const FeasibleSetSpec empty = spec1({0.5}, {1}, {0});
    CHECK(is_feasible(AssignmentMatrix::Zero(1, 2), empty, 1e-12));
    const FeasibleSetSpec s = spec1({0.5}, {1}, {2});
    AssignmentMatrix X = AssignmentMatrix::Zero(1, 2);
    X(0, 1) = 2;
    CHECK(is_feasible(X, s, 1e-12));
    X(0, 1) = 3;
    CHECK_FALSE(is_feasible(X, s, 1e-12));
    X(0, 1) = 2;
    X(0, 0) = 0.5;
    CHECK_FALSE(is_feasible(X, s, 1e-12));
    CHECK_THROWS_AS(is_feasible(AssignmentMatrix::Zero(2, 2), s, 1e-12), InvalidInput);
  }

  TEST_CASE("log_w examples") {
    const FeasibleSetSpec s = spec1({0.5}, {1}, {2});
    AssignmentMatrix X = AssignmentMatrix::Zero(1, 2);
    X(0, 1) = 2;
    CHECK(log_w_sdpml(X, s) == doctest::Approx(2 * std::log(0.5)));
    CHECK(log_g(X, s) == doctest::Approx(2 * std::log(0.5)));
    CHECK(log_w_sdpml(AssignmentMatrix::Zero(1, 2), s) == 0.0);
    CHECK(log_g(AssignmentMatrix::Zero(1, 2), s) == 0.0);
    const FeasibleSetSpec t = spec1({0.5}, {1}, {1});
    AssignmentMatrix Y = AssignmentMatrix::Zero(1, 2);
    Y(0, 0) = 1;
    Y(0, 1) = 1;
    CHECK(log_w_sdpml(Y, t) == doctest::Approx(0.0));
    Y(0, 0) = 0.5;
    CHECK_THROWS_AS(log_w_sdpml(Y, t), InvalidInput);
  }

  TEST_CASE("log_g of a split row") {
    const FeasibleSetSpec s = spec1({0.25}, {1, 3}, {0.5, 0.5});
    AssignmentMatrix X = AssignmentMatrix::Zero(1, 3);
    X(0, 1) = X(0, 2) = 0.5;
    CHECK(log_g(X, s) == doctest::Approx(0.5 * 4 * std::log(0.25) + std::log(2.0)));
    X(0, 1) = -0.1;
    CHECK_THROWS_AS(log_g(X, s), InvalidInput);
  }

  TEST_CASE("gradient special cases") {
    const FeasibleSetSpec s = spec1({0.5, 0.25}, {1, 2}, {1, 1});
    AssignmentMatrix X = AssignmentMatrix::Zero(2, 3);
    X(0, 1) = 1;
    X(1, 2) = 0.4;
    X(1, 1) = 0.4;
    const AssignmentMatrix G = grad_log_g(X, s);
    CHECK(G(0, 1) == doctest::Approx(std::log(0.5)));
    // Equal entries in one row have equal log ratios.
    CHECK(G(1, 1) - s.coef(1, 1) == doctest::Approx(G(1, 2) - s.coef(1, 2)));
  }

  TEST_CASE("gradient matches central differences") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(1e-3, 2.0);
    for (int rep = 0; rep < 50; ++rep) {
      const FeasibleSetSpec s = spec1({1.0, 0.5, 0.2, 0.05}, {1, 2, 5}, {1, 2, 1});
      AssignmentMatrix X(4, 4);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) X(i, j) = u(rng);
      const AssignmentMatrix G = grad_log_g(X, s);
      const double h = 1e-6;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          AssignmentMatrix A = X, B = X;
          A(i, j) += h;
          B(i, j) -= h;
          const double fd = (log_g(A, s) - log_g(B, s)) / (2 * h);
          CHECK(std::abs(fd - G(i, j)) <= 1e-5 * std::max(1.0, std::abs(G(i, j))));
        }
    }
  }

  TEST_CASE("enumeration examples") {
    EnumerationOptions none;
    none.unseen_cap = 0;
    CHECK(enumerate_integral_K(spec1({0.5, 0.25}, {1}, {1}), none).size() == 2);
    CHECK(enumerate_integral_K(spec1({0.5, 0.25}, {1}, {0}), none).size() == 1);
    CHECK(enumerate_integral_K(spec1({0.5}, {1}, {2}), none).size() == 1);
    EnumerationOptions tiny;
    tiny.cap = 1;
    CHECK_THROWS_AS(enumerate_integral_K(spec1({0.5, 0.25}, {1}, {1}), tiny), GuardExceeded);
  }

  TEST_CASE("enumerated matrices are distinct and feasible") {
    const FeasibleSetSpec s = spec1({1.0, 0.5, 0.25}, {1, 2}, {2, 1});
    const auto all = enumerate_integral_K(s, {});
    CHECK(all.size() > 3);
    for (std::size_t a = 0; a < all.size(); ++a) {
      CHECK(is_feasible(all[a], s, 1e-12));
      for (std::size_t b = a + 1; b < all.size(); ++b) CHECK((all[a] - all[b]).cwiseAbs().maxCoeff() > 0.5);
    }
  }

  TEST_CASE("DPML reformulation examples") {
    const ProbabilityGrid g = ProbabilityGrid::build(2, 1.0);
    const FrequencyGrid fg = FrequencyGrid::build(2, 1.0);
    const DiscreteProfile phi = discretize_profile(prof({{1, 2}}), fg);
    const FeasibleSetSpec s = FeasibleSetSpec::from_grids(phi, g);
    DiscretePseudoDistribution q = disc({{0.5, 0.5}}, g);
    CHECK(log_dpml_sum(q, phi, s) == doctest::Approx(std::log(0.5)));

    const DiscreteProfile point = discretize_profile(prof({{2, 1}}), fg);
    const DiscretePseudoDistribution one = disc({{1.0}}, g);
    CHECK(log_dpml_sum(one, point, FeasibleSetSpec::from_grids(point, g)) == doctest::Approx(0.0));

    const FrequencyGrid f1 = FrequencyGrid::build(1, 1.0);
    const DiscreteProfile single = discretize_profile(prof({{1, 1}}), f1);
    const ProbabilityGrid g1 = ProbabilityGrid::build(2, 1.0);
    const DiscretePseudoDistribution three = disc({{0.5, 0.25, 0.25}}, g1);
    const double expect = exact_profile_logprob(three.to_dense(), single.to_profile()).value;
    CHECK(log_dpml_sum(three, single, FeasibleSetSpec::from_grids(single, g1)) == doctest::Approx(expect));
    CHECK(expect == doctest::Approx(0.0));
  }

  TEST_CASE("the K_{q,phi'} sum never exceeds the K_{phi'} sum") {
    const ProbabilityGrid g = ProbabilityGrid::build(2, 1.0);
    const DiscreteProfile phi = discretize_profile(prof({{2, 1}, {1, 1}}), FrequencyGrid::build(3, 1.0));
    const FeasibleSetSpec s = FeasibleSetSpec::from_grids(phi, g);
    EnumerationOptions opts;
    opts.unseen_cap = 2;
    LogSumExp all;
    for_each_integral_K(s, opts, [&](const AssignmentMatrix& X) { all.add(log_w_sdpml(X, s)); });
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 20; ++rep) {
      const DiscretePseudoDistribution q = disc(pml::testing::random_distribution(rng, 1 + static_cast<int>(rng() % 3)), g);
      const double restricted = log_dpml_sum(q, phi, s) - log_c_targets(s);
      CHECK(restricted <= all.value() + 1e-9);
    }
  }

  TEST_CASE("Stirling sandwich on every enumerated matrix") {
    const ProbabilityGrid g = ProbabilityGrid::build(3, 1.0);
    const DiscreteProfile phi = discretize_profile(prof({{2, 1}, {1, 1}}), FrequencyGrid::build(3, 1.0));
    const FeasibleSetSpec s = FeasibleSetSpec::from_grids(phi, g);
    EnumerationOptions opts;
    opts.unseen_cap = 3;
    int count = 0;
    for_each_integral_K(s, opts, [&](const AssignmentMatrix& X) {
      const double diff = log_w_sdpml(X, s) - log_g(X, s);
      const StirlingBounds b = stirling_bounds(X, s);
      CHECK(diff >= b.lower - 1e-9);
      CHECK(diff <= b.upper + 1e-9);
      ++count;
    });
    CHECK(count > 10);
  }

  TEST_CASE("midpoint concavity of log g") {
    std::mt19937_64 rng(10);
    const DiscreteProfile phi = discretize_profile(prof({{3, 1}, {2, 1}, {1, 2}}), FrequencyGrid::build(7, 0.5));
    const FeasibleSetSpec s = FeasibleSetSpec::from_grids(phi, ProbabilityGrid::build(7, 0.5));
    for (int rep = 0; rep < 100; ++rep) {
      const AssignmentMatrix X = pml::testing::random_fractional_point(rng, s), Y = pml::testing::random_fractional_point(rng, s);
      CHECK(log_g(0.5 * (X + Y), s) >= 0.5 * (log_g(X, s) + log_g(Y, s)) - 1e-9);
    }
  }

  TEST_CASE("h(a) = sum a log a - (sum a) log(sum a) has a PSD Hessian") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    for (int dim = 2; dim <= 5; ++dim)
      for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd a(dim);
        for (int i = 0; i < dim; ++i) a(i) = u(rng);
        // Central differences of the gradient log a_i - log(sum a).
        auto grad = [](const Eigen::VectorXd& v) { return Eigen::VectorXd((v.array().log() - std::log(v.sum())).matrix()); };
        const double e = 1e-6;
        Eigen::MatrixXd H(dim, dim);
        for (int i = 0; i < dim; ++i) {
          Eigen::VectorXd p = a, m = a;
          p(i) += e;
          m(i) -= e;
          H.col(i) = (grad(p) - grad(m)) / (2 * e);
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);
      }
  }
}
