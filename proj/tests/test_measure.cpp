#include <catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "tailflow/measure.hpp"
#include "tailflow/subshift_measure.hpp"

using namespace tailflow;

TEST_CASE("bernoulli cylinder masses") {
  BernoulliMeasure b = bernoulli_b_p(Rational(1, 3));
  MeasureRep mu(b);
  REQUIRE(cylinder_mass(mu, 0, parse_word("0")) == Catch::Approx(1.0 / 3.0));
  REQUIRE(cylinder_mass(mu, 2, parse_word("01")) == Catch::Approx(2.0 / 9.0));
  REQUIRE_THROWS_AS(cylinder_mass(mu, -1, parse_word("0")),
                    std::invalid_argument);
  BernoulliMeasure b2 = bernoulli_b_p(Rational(1, 3), true);
  REQUIRE(cylinder_mass(MeasureRep(b2), -2, parse_word("11")) ==
          Catch::Approx(4.0 / 9.0));
}

TEST_CASE("branch equation holds for the prescribed bernoulli measure") {
  for (auto [d, s, eb] : {std::tuple<long long, long long, Rational>{3, 2, {3, 2}},
                          {5, 3, {5, 2}},
                          {2, 2, {3, 2}},
                          {6, 4, {3, 1}}}) {
    KmsParams p = derive(d, s, BetaSpec::log_of(eb));
    MeasureRep mu(bernoulli_for(p));
    REQUIRE(pf4_residual(mu, p, 6) < 1e-13);
    PfReport pf = pf1_pf2_check(p, mu, 6);
    REQUIRE(pf.pf1_residual == 0.0);
  }
}

TEST_CASE("m_p_y series satisfies the branch equation up to its truncation") {
  // The series solves the branch equation only when s = d, with p = e^beta/d.
  KmsParams p = derive(3, 3, BetaSpec::log_of(Rational(3, 2)));
  BiSeq y = BiSeq::periodic(parse_word("1"));
  AtomicMeasure m = m_p_y(*p.p_exact, y, 60);
  REQUIRE(m.truncated_mass < 1e-15);
  double total = 0.0;
  for (const auto& a : m.atoms) total += a.mass;
  REQUIRE(total == Catch::Approx(1.0));
  REQUIRE(pf4_residual(MeasureRep(m), p, 6) < 1e-12);
}

TEST_CASE("m_p_y rejects bad inputs") {
  BiSeq y0 = BiSeq::periodic(parse_word("0"));
  REQUIRE_THROWS_AS(m_p_y(Rational(1, 2), y0, 8), std::invalid_argument);
  BiSeq y = BiSeq::periodic(parse_word("1"));
  REQUIRE_THROWS_AS(m_p_y(Rational(2), y, 8), std::invalid_argument);
}

TEST_CASE("periodic orbit measure is exactly quasi-invariant") {
  KmsParams p = derive(3, 2, BetaSpec::affine(Rational(1, 2)));
  BiSeq y = BiSeq::periodic(parse_word("01"));
  NuPeriodic nu = nu_periodic(y, p);
  REQUIRE(nu.period == 2);
  REQUIRE(nu.q == Rational(1, 2));
  QiResidual qi = quasi_invariance_residual(MeasureRep(nu.measure), p, 5);
  REQUIRE(qi.exact_zero);
  REQUIRE(qi.value == 0.0);
}

TEST_CASE("swapped orbit weights break quasi-invariance") {
  KmsParams p = derive(3, 2, BetaSpec::affine(Rational(1, 3)));
  BiSeq y = BiSeq::periodic(parse_word("011"));
  NuPeriodic nu = nu_periodic(y, p);
  AtomicMeasure bad = nu.measure;
  std::swap(bad.atoms[0].mass, bad.atoms[1].mass);
  std::swap(bad.atoms[0].raw, bad.atoms[1].raw);
  QiResidual qi = quasi_invariance_residual(MeasureRep(bad), p, 4);
  REQUIRE_FALSE(qi.exact_zero);
  REQUIRE(qi.value > 1e-3);
}

TEST_CASE("atom transport ratio law on seeded shifts") {
  KmsParams p = derive(5, 3, BetaSpec::affine(Rational(1, 2)));
  BiSeq z = BiSeq::thue_morse();
  NuTruncated nu = nu_aperiodic_truncated(z, p, 48);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, 94);
  for (int i = 0; i < 200; ++i) {
    int idx = pick(rng);
    long long k = idx - 48;
    const auto& a0 = nu.measure.atoms[static_cast<std::size_t>(idx)];
    const auto& a1 = nu.measure.atoms[static_cast<std::size_t>(idx + 1)];
    // weight(sigma^{k+1} z) / weight(sigma^k z) = lambda^{z_k - q}
    REQUIRE(a1.raw->exponent - a0.raw->exponent ==
            Rational(z.coord(k)) - *p.q_exact);
  }
}

TEST_CASE("truncated family reports a consistent tv defect") {
  KmsParams p = derive(3, 2, BetaSpec::affine(Rational(1, 2)));
  BiSeq z = BiSeq::thue_morse();
  for (long long n : {8, 32, 128}) {
    NuTruncated nu = nu_aperiodic_truncated(z, p, n);
    REQUIRE(nu.tv_defect == Catch::Approx(nu.tv_defect_direct).margin(1e-12));
    // |c_k| <= 1 gives numerator <= 2 lambda^{-1} and norm >= (2n+1) lambda.
    REQUIRE(nu.tv_defect <= 4.0 / static_cast<double>(n));
  }
}

TEST_CASE("two-sided extension has the skewed left marginals") {
  KmsParams p = derive(3, 2, BetaSpec::log_of(Rational(3, 2)));
  MeasureRep mu(bernoulli_for(p));
  CylinderTableMeasure ext = extend_to_two_sided(mu, p, 2, 3);
  double embeta = 2.0 / 3.0;
  double m0 = cylinder_mass(MeasureRep(ext), -1, parse_word("0"));
  double m1 = cylinder_mass(MeasureRep(ext), -1, parse_word("1"));
  REQUIRE(m0 == Catch::Approx(embeta * 2.0 * 0.5).epsilon(1e-12));
  REQUIRE(m1 == Catch::Approx(embeta * 1.0 * 0.5).epsilon(1e-12));
  // Positive coordinates keep the original marginal.
  REQUIRE(cylinder_mass(MeasureRep(ext), 0, parse_word("0")) ==
          Catch::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("extension refuses measures that violate the branch equation") {
  KmsParams p = derive(3, 2, BetaSpec::log_of(Rational(3, 2)));
  MeasureRep wrong(bernoulli_b_p(Rational(1, 4)));
  REQUIRE_THROWS_AS(extend_to_two_sided(wrong, p, 2, 2), std::domain_error);
}

TEST_CASE("thue-morse frequencies are exact and consistent") {
  ThueMorseFrequencies tm;
  REQUIRE(tm.freq(parse_word("01")) == Rational(1, 3));
  REQUIRE(tm.freq(parse_word("11")) == Rational(1, 6));
  REQUIRE(tm.freq(parse_word("000")) == Rational(0));
  REQUIRE(tm.freq(parse_word("010")) == Rational(1, 6));
  // Kolmogorov consistency at length 5 -> 4, both directions.
  for (std::size_t i = 0; i < 16; ++i) {
    Word w = index_word(i, 4);
    Rational right(0), left(0);
    for (std::uint8_t a : {0, 1}) {
      Word wa = w;
      wa.push_back(a);
      right += tm.freq(wa);
      Word aw{a};
      aw.insert(aw.end(), w.begin(), w.end());
      left += tm.freq(aw);
    }
    REQUIRE(right == tm.freq(w));
    REQUIRE(left == tm.freq(w));
  }
}

TEST_CASE("thue-morse frequencies match empirical counts") {
  BiSeq z = BiSeq::thue_morse();
  Word big = z.window(0, 1 << 14);
  ThueMorseFrequencies tm;
  for (std::size_t i = 0; i < 16; ++i) {
    Word w = index_word(i, 4);
    long long count = 0;
    for (std::size_t j = 0; j + 4 <= big.size(); ++j)
      if (std::equal(w.begin(), w.end(), big.begin() + static_cast<long long>(j)))
        ++count;
    double emp = static_cast<double>(count) / static_cast<double>(big.size() - 3);
    REQUIRE(std::abs(emp - tm.freq(w).to_double()) < 1e-3);
  }
}

TEST_CASE("thue-morse table measure sums to one") {
  CylinderTableMeasure t = thue_morse_measure(0, 8);
  double total = 0.0;
  for (double m : t.masses) total += m;
  REQUIRE(total == Catch::Approx(1.0).epsilon(1e-12));
  WeightSum s(t.lambda);
  for (const auto& w : *t.exact) s.add(w);
  WeightSum one(t.lambda);
  one.add(ExactWeight(Rational(1), t.lambda, Rational(0)));
  REQUIRE(s == one);
}

TEST_CASE("tv distance separates and vanishes appropriately") {
  MeasureRep a(bernoulli_b_p(Rational(1, 2)));
  MeasureRep b(bernoulli_b_p(Rational(1, 4)));
  REQUIRE(tv_distance(a, a, 4) == 0.0);
  REQUIRE(tv_distance(a, b, 4) > 0.1);
}
