#include <catch_amalgamated.hpp>
#include <cmath>

#include "tailflow/kms.hpp"

using namespace tailflow;

TEST_CASE("derive fills the branch quantities") {
  KmsParams p = derive(3, 2, BetaSpec::log_of(Rational(3, 2)));
  REQUIRE(p.t == 1);
  REQUIRE(p.lambda_defined);
  REQUIRE(p.lambda == Rational(1, 2));
  REQUIRE(p.q_defined);
  REQUIRE_FALSE(p.q_exact);  // log(3/2) is not rationally placed in [log1, log2]
  REQUIRE(p.q_value ==
          Catch::Approx((std::log(2.0) - std::log(1.5)) / std::log(2.0)));
  REQUIRE(p.p_exact);
  REQUIRE(*p.p_exact == Rational(1, 2));
  REQUIRE(p.trace_mass_exact);
  REQUIRE(*p.trace_mass_exact == Rational(1, 2));
}

TEST_CASE("affine beta makes q exact") {
  KmsParams p = derive(3, 2, BetaSpec::affine(Rational(1, 2)));
  REQUIRE(p.q_exact);
  REQUIRE(*p.q_exact == Rational(1, 2));
  REQUIRE(p.beta_value == Catch::Approx(0.5 * std::log(2.0)));
}

TEST_CASE("rational q is detected from log-rational beta") {
  // e^beta = 2 and (s,t) = (4,1): 2^2 = 4, so beta = (1/2) log 4, q = 1/2.
  KmsParams p = derive(5, 4, BetaSpec::log_of(Rational(2)));
  REQUIRE(p.q_exact);
  REQUIRE(*p.q_exact == Rational(1, 2));
  // e^beta = 12 is s^1 t^1 for (s,t) = (6,2)... not in range; check a clean
  // interior case instead: (s,t) = (4,2), e^beta = sqrt(8) is irrational, but
  // e^beta = 2 sits at q = 1 exactly since 2 = t.
  KmsParams p2 = derive(6, 4, BetaSpec::log_of(Rational(2)));
  REQUIRE(p2.q_exact);
  REQUIRE(*p2.q_exact == Rational(1));
}

TEST_CASE("derive validates its domain") {
  REQUIRE_THROWS_AS(derive(1, 1, BetaSpec::of(1.0)), std::invalid_argument);
  REQUIRE_THROWS_AS(derive(4, 1, BetaSpec::of(1.0)), std::invalid_argument);
  REQUIRE_THROWS_AS(derive(4, 5, BetaSpec::of(1.0)), std::invalid_argument);
  REQUIRE_THROWS_AS(derive(3, 2, BetaSpec::log_of(Rational(1))),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(derive(3, 2, BetaSpec::of(0.0)), std::invalid_argument);
}

TEST_CASE("admissible beta intervals per branch") {
  BetaRange r1 = admissible_beta(2, 2);  // t = 0
  REQUIRE_FALSE(r1.lower);
  REQUIRE(r1.upper == Catch::Approx(std::log(2.0)));
  REQUIRE(r1.upper_closed);

  BetaRange r2 = admissible_beta(4, 2);  // t = s
  REQUIRE(r2.lower);
  REQUIRE(*r2.lower == r2.upper);
  REQUIRE(r2.upper == Catch::Approx(std::log(2.0)));

  BetaRange r3 = admissible_beta(3, 2);  // t = 1
  REQUIRE(r3.lower);
  REQUIRE(*r3.lower == 0.0);
  REQUIRE_FALSE(r3.lower_closed);
  REQUIRE(r3.upper == Catch::Approx(std::log(2.0)));

  BetaRange r4 = admissible_beta(5, 3);  // 2 <= t < s
  REQUIRE(*r4.lower == Catch::Approx(std::log(2.0)));
  REQUIRE(r4.lower_closed);
  REQUIRE(r4.upper == Catch::Approx(std::log(3.0)));

  REQUIRE_THROWS_AS(admissible_beta(2, 1), std::invalid_argument);
}

TEST_CASE("beta admissibility predicate") {
  REQUIRE(beta_admissible(derive(5, 3, BetaSpec::log_of(Rational(5, 2)))));
  REQUIRE_FALSE(beta_admissible(derive(5, 3, BetaSpec::log_of(Rational(4)))));
  REQUIRE(beta_admissible(derive(2, 2, BetaSpec::log_of(Rational(1, 2)))));
}

TEST_CASE("gicar scalar reduction") {
  GicarReport g = gicar_solve(derive(4, 3, BetaSpec::log_of(Rational(2))));
  REQUIRE(g.r_exact);
  REQUIRE(*g.r_exact == Rational(1, 2));
  REQUIRE(g.lambda_prime_exact);
  REQUIRE(*g.lambda_prime_exact == Rational(1, 2));
  REQUIRE_FALSE(g.single_beta);

  GicarReport g2 = gicar_solve(derive(6, 3, BetaSpec::log_of(Rational(3))));
  REQUIRE(g2.single_beta);
  REQUIRE(*g2.lambda_prime_exact == Rational(1, 3));

  REQUIRE_THROWS_AS(gicar_solve(derive(5, 3, BetaSpec::log_of(Rational(4)))),
                    std::domain_error);
}
