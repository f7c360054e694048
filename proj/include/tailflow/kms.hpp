#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "tailflow/rational.hpp"

namespace tailflow {

/// Inverse temperature, either a plain float or one of two symbolic forms
/// that keep downstream quantities exact:
///   log_of(a/b): beta = log(a/b), so e^beta is exactly a/b;
///   affine(x):   beta = x log s + (1-x) log t, so q = 1-x exactly.
struct BetaSpec {
  enum class Kind { Float, LogOf, Affine };
  Kind kind = Kind::Float;
  double fval = 0.0;
  Rational r{0};

  static BetaSpec of(double v) {
    BetaSpec b;
    b.kind = Kind::Float;
    b.fval = v;
    return b;
  }
  static BetaSpec log_of(Rational v) {
    if (!(Rational(0) < v))
      throw std::invalid_argument("BetaSpec: log_of argument must be positive");
    BetaSpec b;
    b.kind = Kind::LogOf;
    b.r = std::move(v);
    return b;
  }
  static BetaSpec affine(Rational x) {
    BetaSpec b;
    b.kind = Kind::Affine;
    b.r = std::move(x);
    return b;
  }

  double eval(long long s, long long t) const {
    switch (kind) {
      case Kind::Float:
        return fval;
      case Kind::LogOf:
        return std::log(r.to_double());
      case Kind::Affine:
        if (t < 1)
          throw std::domain_error("BetaSpec: affine form requires t >= 1");
        return r.to_double() * std::log(static_cast<double>(s)) +
               (Rational(1) - r).to_double() * std::log(static_cast<double>(t));
    }
    return 0.0;
  }
};

namespace detail {

// Looks for rational x = j/m with (a/b)^m = s^{m-j} t^j, i.e. beta = log(a/b)
// expressible as x log s + (1-x) log t with x = (m-j)/m. Returns q = j/m.
inline std::optional<Rational> detect_rational_q(const Rational& ebeta,
                                                 long long s, long long t) {
  if (t < 1 || t >= s) return std::nullopt;
  auto powi = [](long long base, long long e, __int128& out) {
    out = 1;
    for (long long i = 0; i < e; ++i) {
      out *= base;
      if (out > static_cast<__int128>(1) << 120) return false;
    }
    return true;
  };
  long long a = ebeta.num(), b = ebeta.den();
  for (long long m = 1; m <= 24; ++m) {
    __int128 am, bm;
    if (!powi(a, m, am) || !powi(b, m, bm)) break;
    for (long long j = 0; j <= m; ++j) {
      __int128 sp, tp;
      if (!powi(s, m - j, sp) || !powi(t, j, tp)) continue;
      // a^m / b^m == s^{m-j} t^j  <=>  a^m == b^m s^{m-j} t^j
      if (am == bm * sp * tp) return Rational(j, m);
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Parameter bundle of the (d, s, t, beta) correspondence family, with the
/// derived quantities lambda = t/s, q = (log s - beta)/(log s - log t),
/// p = (e^beta - t)/(s - t), and the trace mass e^beta / d. Fields that are
/// undefined for the branch are flagged, not NaN.
struct KmsParams {
  long long d = 2;
  long long s = 2;
  long long t = 0;
  BetaSpec beta;
  double beta_value = 0.0;

  bool lambda_defined = false;  // t >= 1
  Rational lambda{1};

  bool q_defined = false;  // 1 <= t < s
  double q_value = 0.0;
  std::optional<Rational> q_exact;

  bool p_defined = false;  // t != s
  double p_value = 0.0;
  std::optional<Rational> p_exact;

  std::optional<Rational> ebeta_exact;  // when beta is log_of a rational
  double trace_mass = 0.0;
  std::optional<Rational> trace_mass_exact;
};

inline KmsParams derive(long long d, long long s, const BetaSpec& beta) {
  if (d < 2) throw std::invalid_argument("derive: d must be >= 2");
  if (2 * s < d || s > d)
    throw std::invalid_argument("derive: s must satisfy d/2 <= s <= d");
  KmsParams p;
  p.d = d;
  p.s = s;
  p.t = d - s;
  p.beta = beta;
  p.beta_value = beta.eval(s, p.t);
  bool beta_zero = p.beta_value == 0.0 ||
                   (beta.kind == BetaSpec::Kind::LogOf && beta.r == Rational(1));
  if (beta_zero) throw std::invalid_argument("derive: beta must be nonzero");

  if (p.t >= 1) {
    p.lambda_defined = true;
    p.lambda = Rational(p.t, s);
  }
  if (p.t >= 1 && p.t < s) {
    p.q_defined = true;
    double ls = std::log(static_cast<double>(s));
    double lt = std::log(static_cast<double>(p.t));
    p.q_value = (ls - p.beta_value) / (ls - lt);
    if (beta.kind == BetaSpec::Kind::Affine)
      p.q_exact = Rational(1) - beta.r;
    else if (beta.kind == BetaSpec::Kind::LogOf)
      p.q_exact = detail::detect_rational_q(beta.r, s, p.t);
    if (p.q_exact) p.q_value = p.q_exact->to_double();
  }
  if (beta.kind == BetaSpec::Kind::LogOf) p.ebeta_exact = beta.r;
  double eb = std::exp(p.beta_value);
  if (p.ebeta_exact) eb = p.ebeta_exact->to_double();
  if (p.t != s) {
    p.p_defined = true;
    p.p_value = (eb - static_cast<double>(p.t)) / static_cast<double>(s - p.t);
    if (p.ebeta_exact)
      p.p_exact = (*p.ebeta_exact - Rational(p.t)) / Rational(s - p.t);
  }
  p.trace_mass = eb / static_cast<double>(d);
  if (p.ebeta_exact) p.trace_mass_exact = *p.ebeta_exact / Rational(d);
  return p;
}

/// Admissible beta interval for existence of an infinite-type KMS state.
struct BetaRange {
  std::optional<double> lower;  // absent = unbounded below
  double upper = 0.0;
  bool lower_closed = false;
  bool upper_closed = true;
  bool excludes_zero = true;
};

inline BetaRange admissible_beta(long long d, long long s) {
  if (d < 2) throw std::invalid_argument("admissible_beta: d must be >= 2");
  if (2 * s < d || s > d)
    throw std::invalid_argument("admissible_beta: s must satisfy d/2 <= s <= d");
  long long t = d - s;
  BetaRange r;
  if (t == 0) {
    // s = d: beta <= log d, unbounded below, zero excluded.
    r.upper = std::log(static_cast<double>(d));
    r.upper_closed = true;
    return r;
  }
  if (t == s) {
    if (d <= 2)
      throw std::invalid_argument(
          "admissible_beta: s = t = 1 forces beta = 0, which is excluded");
    double b = std::log(static_cast<double>(d) / 2.0);
    r.lower = b;
    r.upper = b;
    r.lower_closed = true;
    r.upper_closed = true;
    return r;
  }
  if (t == 1) {
    r.lower = 0.0;
    r.lower_closed = false;
    r.upper = std::log(static_cast<double>(s));
    return r;
  }
  r.lower = std::log(static_cast<double>(t));
  r.lower_closed = true;
  r.upper = std::log(static_cast<double>(s));
  return r;
}

inline bool beta_admissible(const KmsParams& p) {
  BetaRange r = admissible_beta(p.d, p.s);
  double b = p.beta_value;
  if (b == 0.0) return false;
  if (r.lower) {
    if (r.lower_closed ? b < *r.lower - 1e-12 : b <= *r.lower + 1e-12)
      return false;
  }
  if (r.upper_closed ? b > r.upper + 1e-12 : b >= r.upper - 1e-12) return false;
  return true;
}

/// Scalar reduction of the gauge-invariant CAR family: the extreme trace is
/// the Powers state tau_r with s r + t (1 - r) = e^beta, and the factor is
/// the Powers factor of type III_{e^{-beta}} (III_{2/d} when s = t).
struct GicarReport {
  bool single_beta = false;  // s = t branch: beta = log(d/2) forced
  std::optional<Rational> r_exact;
  double r = 0.0;
  std::optional<Rational> lambda_prime_exact;
  double lambda_prime = 0.0;
  std::string type_label;
};

inline GicarReport gicar_solve(const KmsParams& p) {
  GicarReport g;
  if (p.t == p.s) {
    g.single_beta = true;
    g.lambda_prime = 2.0 / static_cast<double>(p.d);
    g.lambda_prime_exact = Rational(2, p.d);
    g.type_label = "III_{2/d}";
    return g;
  }
  double eb = p.ebeta_exact ? p.ebeta_exact->to_double()
                            : std::exp(p.beta_value);
  if (p.t >= 1 &&
      (p.beta_value < std::log(static_cast<double>(p.t)) - 1e-12 ||
       p.beta_value > std::log(static_cast<double>(p.s)) + 1e-12))
    throw std::domain_error("gicar_solve: beta outside [log t, log s]");
  if (p.t == 0 && p.beta_value > std::log(static_cast<double>(p.s)) + 1e-12)
    throw std::domain_error("gicar_solve: beta above log s");
  g.r = (eb - static_cast<double>(p.t)) / static_cast<double>(p.s - p.t);
  if (p.ebeta_exact) {
    g.r_exact = (*p.ebeta_exact - Rational(p.t)) / Rational(p.s - p.t);
    g.lambda_prime_exact = Rational(1) / *p.ebeta_exact;
    g.lambda_prime = g.lambda_prime_exact->to_double();
  } else {
    g.lambda_prime = std::exp(-p.beta_value);
  }
  g.type_label = "III_{e^-beta}";
  return g;
}

}  // namespace tailflow
