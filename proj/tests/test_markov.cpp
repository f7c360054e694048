#include <catch_amalgamated.hpp>

#include "tailflow/markov.hpp"

using namespace tailflow;

namespace {

MarkovOp three_cycle() { return permutation_operator({1, 2, 0}); }

MarkovOp mixing_2x2() {
  MarkovOp op;
  op.matrix = Eigen::MatrixXd(2, 2);
  op.matrix << 0.3, 0.7, 0.6, 0.4;
  return op;
}

}  // namespace

TEST_CASE("validation rejects malformed operators") {
  MarkovOp bad;
  bad.matrix = Eigen::MatrixXd(2, 2);
  bad.matrix << 0.5, 0.6, 0.5, 0.5;
  REQUIRE_THROWS_AS(validate_markov(bad), std::invalid_argument);
  bad.matrix << -0.1, 1.1, 0.5, 0.5;
  REQUIRE_THROWS_AS(validate_markov(bad), std::invalid_argument);
}

TEST_CASE("fixed space of a cycle is the constants") {
  auto basis = harmonic_fixed_space(three_cycle());
  REQUIRE(basis.size() == 1);
  REQUIRE(basis[0](0) == Catch::Approx(basis[0](1)));
  REQUIRE(basis[0](1) == Catch::Approx(basis[0](2)));
}

TEST_CASE("fixed space of the identity is everything") {
  auto basis = harmonic_fixed_space(permutation_operator({0, 1, 2, 3}));
  REQUIRE(basis.size() == 4);
}

TEST_CASE("fixed space of a mixing chain is one-dimensional") {
  auto basis = harmonic_fixed_space(mixing_2x2());
  REQUIRE(basis.size() == 1);
}

TEST_CASE("tail of a cycle is the cycle itself") {
  BoundaryReport r = tail_decomposition(three_cycle());
  REQUIRE(r.tail_dim == 3);
  REQUIRE(r.poisson_dim == 1);
  REQUIRE(r.exact_mode);
  REQUIRE(r.sigma_permutation);
  REQUIRE(*r.sigma_permutation == std::vector<long long>{1, 2, 0});
}

TEST_CASE("tail of the bernoulli truncation is trivial") {
  for (int depth : {1, 2, 4, 6}) {
    MarkovOp op = bernoulli_shift_operator(
        2, depth, {Rational(1, 2), Rational(1, 2)});
    BoundaryReport r = tail_decomposition(op);
    REQUIRE(r.tail_dim == 1);
    REQUIRE(r.poisson_dim == 1);
  }
}

TEST_CASE("skewed weights do not change the trivial tail") {
  MarkovOp op = bernoulli_shift_operator(3, 3, {Rational(1, 2), Rational(1, 3),
                                                Rational(1, 6)});
  BoundaryReport r = tail_decomposition(op);
  REQUIRE(r.tail_dim == 1);
}

TEST_CASE("powers of P share the eventual image with sigma powered") {
  // Block operator: a 2-cycle on top of a collapsing part.
  MarkovOp op;
  op.matrix = Eigen::MatrixXd(3, 3);
  op.matrix << 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.5, 0.5, 0.0;
  BoundaryReport r1 = tail_decomposition(op);
  MarkovOp op2;
  op2.matrix = op.matrix * op.matrix;
  BoundaryReport r2 = tail_decomposition(op2);
  REQUIRE(r1.tail_dim == 2);
  REQUIRE(r2.tail_dim == 2);
  for (int k = 3; k <= 4; ++k) {
    MarkovOp opk;
    opk.matrix = op.matrix;
    for (int i = 1; i < k; ++i) opk.matrix = opk.matrix * op.matrix;
    REQUIRE(tail_decomposition(opk).tail_dim == 2);
  }
  // sigma of P^2 is sigma(P)^2 = identity on the 2-dimensional tail.
  REQUIRE((r2.sigma - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-9);
}

TEST_CASE("stationary weights restrict invariantly") {
  MarkovOp op = three_cycle();
  op.stationary = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  BoundaryReport r = tail_decomposition(op);
  REQUIRE(r.stationary_invariant);
  REQUIRE(*r.stationary_invariant);
}

TEST_CASE("backward shift patterns realize the translation tail") {
  BackwardShiftReport r = backward_shift_pattern_check(24);
  REQUIRE(r.patterns_checked >= 2);
  REQUIRE(r.patterns_matched == r.patterns_checked);
  REQUIRE(r.independence_ok);
}

TEST_CASE("products converge on mixing chains and oscillate on cycles") {
  Eigen::VectorXd f(2), g(2);
  f << 1.0, 2.0;
  g << 3.0, -1.0;
  ConvergenceReport mix = simulate_P_convergence(mixing_2x2(), f, g, 500);
  REQUIRE(mix.converged);
  // Limit is the stationary average of f*g times the constant function.
  // pi = (6/13, 7/13) for the 0.3/0.7, 0.6/0.4 chain.
  double expected = (6.0 / 13.0) * 3.0 + (7.0 / 13.0) * -2.0;
  REQUIRE((*mix.limit)(0) == Catch::Approx(expected).margin(1e-8));
  REQUIRE((*mix.limit)(1) == Catch::Approx(expected).margin(1e-8));

  Eigen::VectorXd f3(3), g3(3);
  f3 << 1.0, 0.0, 0.0;
  g3 << 1.0, 1.0, 0.0;
  ConvergenceReport cyc = simulate_P_convergence(three_cycle(), f3, g3, 50);
  REQUIRE_FALSE(cyc.converged);
  REQUIRE(cyc.oscillating);

  Eigen::VectorXd c = Eigen::VectorXd::Constant(3, 2.0);
  ConvergenceReport con = simulate_P_convergence(three_cycle(), c, c, 10);
  REQUIRE(con.converged);
  REQUIRE((*con.limit)(0) == Catch::Approx(4.0));
}
