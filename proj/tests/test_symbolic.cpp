#include <catch_amalgamated.hpp>

#include "tailflow/sequence.hpp"

using namespace tailflow;

namespace {

int popcount_parity(unsigned long long v) {
  return __builtin_popcountll(v) & 1;
}

}  // namespace

TEST_CASE("thue-morse right half matches the popcount parity closed form") {
  BiSeq z = BiSeq::thue_morse();
  Word w = z.window(0, 1 << 12);
  for (unsigned long long j = 0; j < (1ull << 12); ++j)
    REQUIRE(static_cast<int>(w[j]) == popcount_parity(j));
}

TEST_CASE("thue-morse left half mirrors the right half") {
  // The two-sided fixed point built from the squared rule satisfies
  // z_{-1-j} = z_j: the reversal of rule^2n(0) complements bit indices in an
  // even number of binary digits, which preserves popcount parity.
  BiSeq z = BiSeq::thue_morse();
  for (long long j = 0; j < 4096; ++j)
    REQUIRE(z.coord(-1 - j) == z.coord(j));
}

TEST_CASE("substitution squares the rule when the seeds need it") {
  // Seed 0|0 is not a fixed-point pair for 0->01, 1->10 but is for its square.
  BiSeq z = BiSeq::thue_morse();
  REQUIRE(z.coord(0) == 0);
  REQUIRE(z.coord(-1) == 0);
  REQUIRE(z.window(-4, 4) == parse_word("01100110"));
}

TEST_CASE("substitution rejects impossible seed pairs") {
  REQUIRE_THROWS_AS(
      BiSeq::substitution({parse_word("01"), parse_word("00")}, 1, 1),
      std::invalid_argument);
}

TEST_CASE("eventually periodic windows") {
  BiSeq z = BiSeq::eventually_periodic(parse_word("10"), parse_word("111"),
                                       parse_word("0"), 0);
  REQUIRE(z.window(-4, 0) == parse_word("1010"));
  REQUIRE(z.window(0, 3) == parse_word("111"));
  REQUIRE(z.window(3, 7) == parse_word("0000"));
}

TEST_CASE("shift composes as a group action") {
  BiSeq z = BiSeq::thue_morse();
  BiSeq w = z.shifted(5).shifted(-2).shifted(4);
  for (long long j = -20; j < 20; ++j) REQUIRE(w.coord(j) == z.coord(j + 7));
}

TEST_CASE("zero prefixed points") {
  BiSeq y = BiSeq::periodic(parse_word("10"));
  BiSeq z = BiSeq::zero_prefixed(Word(3, 0), y);
  REQUIRE(z.window(-2, 0) == parse_word("00"));
  REQUIRE(z.window(0, 3) == parse_word("000"));
  REQUIRE(z.window(3, 7) == parse_word("1010"));
}

TEST_CASE("toeplitz generator recursion") {
  std::vector<long long> k{3, 3, 3};
  ToeplitzWords t0 = toeplitz_words(k, 0);
  REQUIRE(t0.a == parse_word("1"));
  REQUIRE(t0.b == parse_word("0"));
  ToeplitzWords t1 = toeplitz_words(k, 1);
  REQUIRE(t1.a == parse_word("101"));
  REQUIRE(t1.b == parse_word("100"));
  REQUIRE(t1.l == 3);
  ToeplitzWords t2 = toeplitz_words(k, 2);
  REQUIRE(t2.l == 9);
  // Nesting: a(n+1) starts with a(n), b(n+1) starts with a(n).
  REQUIRE(Word(t2.a.begin(), t2.a.begin() + 3) == t1.a);
  REQUIRE(Word(t2.b.begin(), t2.b.begin() + 3) == t1.a);
}

TEST_CASE("toeplitz nesting across levels and parameter growth") {
  std::vector<long long> k{3, 4, 5, 6, 7};
  for (int n = 0; n + 1 <= 5; ++n) {
    ToeplitzWords lo = toeplitz_words(k, n);
    ToeplitzWords hi = toeplitz_words(k, n + 1);
    REQUIRE(hi.l == lo.l * k[static_cast<std::size_t>(n)]);
    REQUIRE(Word(hi.a.begin(), hi.a.begin() + lo.a.size()) == lo.a);
  }
}

TEST_CASE("toeplitz sequence agrees with the generator words") {
  std::vector<long long> k{3, 3, 3, 3};
  BiSeq z = BiSeq::toeplitz(k);
  ToeplitzWords t = toeplitz_words(k, 4);
  REQUIRE(z.window(0, t.l) == t.a);
  REQUIRE(z.window(-3, 0) == parse_word("000"));
  // Beyond the provided entries k repeats its last value; earlier coordinates
  // are unchanged by the nesting.
  Word two = z.window(0, 2 * t.l);
  REQUIRE(two.size() == static_cast<std::size_t>(2 * t.l));
  REQUIRE(Word(two.begin(), two.begin() + t.l) == t.a);
}

TEST_CASE("toeplitz rejects parameters below 3") {
  REQUIRE_THROWS_AS(BiSeq::toeplitz({2}), std::invalid_argument);
  REQUIRE_THROWS_AS(toeplitz_words({3, 2}, 2), std::invalid_argument);
}

TEST_CASE("minimal period of periodic points is exact") {
  PeriodCheck pc = minimal_period(BiSeq::periodic(parse_word("0110")), 16);
  REQUIRE(pc.exact);
  REQUIRE(pc.period);
  REQUIRE(*pc.period == 4);
  // (01)^4 written as an 8-word still has minimal period 2.
  PeriodCheck pc2 = minimal_period(BiSeq::periodic(parse_word("01010101")), 16);
  REQUIRE(*pc2.period == 2);
}

TEST_CASE("aperiodic points report no period on the window") {
  PeriodCheck pc = minimal_period(BiSeq::thue_morse(), 32);
  REQUIRE_FALSE(pc.period);
  REQUIRE_FALSE(pc.exact);
  REQUIRE(pc.window_width == 128);
}

TEST_CASE("eventually periodic with distinct tails has no period") {
  BiSeq z = BiSeq::eventually_periodic(parse_word("0"), {}, parse_word("1"));
  PeriodCheck pc = minimal_period(z, 8);
  REQUIRE(pc.exact);
  REQUIRE_FALSE(pc.period);
}
