#include <catch_amalgamated.hpp>
#include <random>

#include "tailflow/cocycle.hpp"

using namespace tailflow;

TEST_CASE("cocycle closed forms at small n") {
  BiSeq z = BiSeq::periodic(parse_word("011"));
  Rational q(2, 3);
  REQUIRE(cocycle(z, 0, q).exact_value == Rational(0));
  // z_0 z_1 z_2 = 011: c_1 = 0 - 2/3, c_2 = 1 - 4/3, c_3 = 2 - 2.
  REQUIRE(cocycle(z, 1, q).exact_value == Rational(-2, 3));
  REQUIRE(cocycle(z, 2, q).exact_value == Rational(-1, 3));
  REQUIRE(cocycle(z, 3, q).exact_value == Rational(0));
  // c_{-1} = -z_{-1} + q = -1 + 2/3.
  REQUIRE(cocycle(z, -1, q).exact_value == Rational(-1, 3));
  REQUIRE(cocycle(z, -3, q).exact_value == Rational(0));
}

TEST_CASE("cocycle identity on seeded random pairs") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<long long> pick(-200, 200);
  std::vector<std::pair<long long, long long>> pairs;
  for (int i = 0; i < 1000; ++i) pairs.emplace_back(pick(rng), pick(rng));

  for (const BiSeq& z : {BiSeq::thue_morse(), BiSeq::toeplitz({3, 4, 3}),
                         BiSeq::periodic(parse_word("0010111"))}) {
    auto checks = check_cocycle_identity(z, pairs, Rational(1, 2));
    for (const auto& c : checks) {
      REQUIRE(c.exact_equal);
      REQUIRE(c.residual == 0.0);
    }
  }
}

TEST_CASE("bound scan matches direct evaluation") {
  BiSeq z = BiSeq::thue_morse();
  Rational q(1, 2);
  BoundScan bs = bound_scan(z, q, 64);
  Rational lo(0), hi(0);
  for (long long k = -64; k <= 64; ++k) {
    Rational c = cocycle(z, k, q).exact_value;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  REQUIRE(bs.min == lo);
  REQUIRE(bs.max == hi);
}

TEST_CASE("thue-morse cocycle stays in [-1, 1]") {
  BoundScan bs = bound_scan(BiSeq::thue_morse(), Rational(1, 2), 4096);
  REQUIRE(bs.min >= Rational(-1));
  REQUIRE(bs.max <= Rational(1));
}

TEST_CASE("solve_transfer finds an exact transfer function for thue-morse") {
  BiSeq z = BiSeq::thue_morse();
  Rational q(1, 2);
  TransferFunction h = solve_transfer({z}, q, 4);
  REQUIRE(h.exact);
  REQUIRE(h.residual == 0.0);
  // The defining relation on consecutive central words, checked directly.
  for (long long k = -100; k < 100; ++k) {
    Word a = z.window(k - 4, k + 4);
    Word b = z.window(k - 3, k + 5);
    Rational diff = h.exact_table.at(b) - h.exact_table.at(a);
    REQUIRE(diff == Rational(z.coord(k)) - q);
  }
}

TEST_CASE("solve_transfer rejects drifting cocycles") {
  // (011)^infty at q = 1/2 drifts by +1/2 per period, so c is unbounded.
  BiSeq z = BiSeq::periodic(parse_word("011"));
  TransferOptions opt;
  opt.scan_window = 256;
  REQUIRE_THROWS_AS(solve_transfer({z}, Rational(1, 2), 3, opt),
                    std::domain_error);
}

TEST_CASE("transfer values are determined up to the pinned basepoint") {
  BiSeq z = BiSeq::thue_morse();
  TransferFunction h = solve_transfer({z}, Rational(1, 2), 3);
  Rational base = h.exact_table.at(h.base_word);
  REQUIRE(base == Rational(0));
  // All values live on the half-integer grid for q = 1/2.
  for (const auto& [w, v] : h.exact_table) {
    Rational doubled = v * Rational(2);
    REQUIRE(doubled.is_integer());
  }
}
