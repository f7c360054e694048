#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "tailflow/cocycle.hpp"
#include "tailflow/kms.hpp"
#include "tailflow/sequence.hpp"

namespace tailflow {

/// Factor-type labels produced by the classifier. The aperiodic branch is an
/// open problem and is reported as such rather than resolved.
enum class FactorType {
  PowersIIILambda,        // III_{lambda'} with lambda' in (0,1)
  IIIZero,                // III_0
  IIOne,                  // hyperfinite II_1
  SemifiniteOpen,         // semifinite; finer type undetermined
  NotExtremeSemifinite,   // dissipative, not an extreme point
};

inline std::string factor_type_label(FactorType t) {
  switch (t) {
    case FactorType::PowersIIILambda: return "III_lambda";
    case FactorType::IIIZero: return "III_0";
    case FactorType::IIOne: return "II_1";
    case FactorType::SemifiniteOpen: return "semifinite-open";
    case FactorType::NotExtremeSemifinite: return "not-extreme-semifinite";
  }
  return "?";
}

struct ReducedFlow {
  enum class Kind {
    Trivial,
    TranslationZ,     // translation of the integers
    FiniteCycle,      // n-point cycle
    ShiftTwoSided,    // shift on ({0,1}^Z, nu)
    SubshiftMeasure,  // shift on a subshift with a diffuse measure
  };
  Kind kind = Kind::Trivial;
  long long cycle_length = 0;
  std::string descriptor;
};

struct FactorVerdict {
  std::optional<FactorType> type;  // absent: flow descriptor only
  std::optional<Rational> lambda_exact;
  double lambda_value = 0.0;
  ReducedFlow flow;
  bool forward_time = true;  // sign of beta
  std::optional<double> trace_mass;
  std::optional<Rational> trace_mass_exact;
};

/// The families of extreme (or distinguished) KMS data the classifier knows.
struct PeriodicOrbitDatum {
  BiSeq y;
  long long period = 0;
};
struct AperiodicOrbitDatum {
  BiSeq z;
  long long window = 0;
};
struct BernoulliPointDatum {};
struct ShiftInvariantDatum {
  std::string descriptor;
  bool atomic_periodic = false;
  long long period = 0;
};
struct CoboundaryDatum {
  std::string subshift = "thue-morse";
};
struct SdBoundaryDatum {
  BiSeq y;
};
struct GicarDatum {};

using KmsFamily =
    std::variant<BernoulliPointDatum, PeriodicOrbitDatum, AperiodicOrbitDatum,
                 ShiftInvariantDatum, CoboundaryDatum, SdBoundaryDatum,
                 GicarDatum>;

struct KmsDatum {
  KmsParams params;
  KmsFamily family;
};

/// Window certificate for the summability condition sum_n lambda^{c_n(z)} < inf
/// and its sufficient Cesaro criterion. Verdicts only ever speak about the
/// inspected window.
struct ConditionCReport {
  enum class Verdict { Satisfied, Violated, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  double partial_sum = 0.0;
  double left_average_max = 0.0;   // limsup proxy of (1/n) sum z_{-k}
  double right_average_min = 1.0;  // liminf proxy of (1/n) sum z_k
  double q = 0.0;
  double outer_min_abs_c = 0.0;    // min |c_n| over the outer half window
  long long window = 0;
};

inline ConditionCReport check_condition_C(const BiSeq& z,
                                          const KmsParams& params,
                                          long long window) {
  if (params.t < 1 || params.t >= params.s)
    throw std::invalid_argument("check_condition_C: requires 0 < t < s");
  if (window < 2)
    throw std::invalid_argument("check_condition_C: window must be >= 2");
  ConditionCReport r;
  r.window = window;
  r.q = params.q_value;
  double lam = Rational(params.t, params.s).to_double();

  Word w = z.window(-window - 1, window + 2);
  auto sym = [&](long long j) {
    return static_cast<double>(w[static_cast<std::size_t>(j + window + 1)]);
  };
  // c over |n| <= window+1 by running sums.
  std::vector<double> c(static_cast<std::size_t>(2 * window + 3));
  auto cref = [&](long long n) -> double& {
    return c[static_cast<std::size_t>(n + window + 1)];
  };
  cref(0) = 0.0;
  for (long long n = 0; n <= window; ++n)
    cref(n + 1) = cref(n) + sym(n) - r.q;
  for (long long n = 0; n >= -window; --n)
    cref(n - 1) = cref(n) - sym(n - 1) + r.q;

  for (long long n = -window; n <= window; ++n)
    r.partial_sum += std::pow(lam, cref(n));

  double lsum = 0.0, rsum = 0.0;
  r.left_average_max = 0.0;
  r.right_average_min = 1.0;
  for (long long L = 1; L <= window; ++L) {
    lsum += sym(-L);
    rsum += sym(L - 1);
    if (L >= window / 2) {
      r.left_average_max = std::max(r.left_average_max, lsum / static_cast<double>(L));
      r.right_average_min = std::min(r.right_average_min, rsum / static_cast<double>(L));
    }
  }
  r.outer_min_abs_c = std::abs(cref(window));
  for (long long n = window / 2; n <= window; ++n) {
    r.outer_min_abs_c = std::min(r.outer_min_abs_c, std::abs(cref(n)));
    r.outer_min_abs_c = std::min(r.outer_min_abs_c, std::abs(cref(-n)));
  }

  PeriodCheck pc = minimal_period(z, std::min<long long>(64, window / 2));
  if (pc.period) {
    r.verdict = ConditionCReport::Verdict::Violated;
    return r;
  }
  if (r.left_average_max < r.q && r.q < r.right_average_min) {
    r.verdict = ConditionCReport::Verdict::Satisfied;
  } else if (r.outer_min_abs_c <= 0.5) {
    // c returns near zero in the outer half: the series terms do not decay.
    r.verdict = ConditionCReport::Verdict::Violated;
  } else {
    r.verdict = ConditionCReport::Verdict::Inconclusive;
  }
  return r;
}

namespace detail {

inline Rational orbit_lambda_product(const Word& orbit_word, long long s,
                                     long long t) {
  // prod_k 1/(s^{1-y_k} t^{y_k})
  Rational v(1);
  for (auto b : orbit_word) v /= Rational(b ? t : s);
  return v;
}

}  // namespace detail

inline FactorVerdict classify(const KmsDatum& datum) {
  const KmsParams& p = datum.params;
  FactorVerdict v;
  v.forward_time = p.beta_value > 0.0;

  if (std::holds_alternative<GicarDatum>(datum.family)) {
    GicarReport g = gicar_solve(p);
    v.type = FactorType::PowersIIILambda;
    v.lambda_exact = g.lambda_prime_exact;
    v.lambda_value = g.lambda_prime;
    v.flow.kind = ReducedFlow::Kind::Trivial;
    v.flow.descriptor = g.single_beta ? "gicar s=t" : "gicar";
    return v;
  }

  if (p.t == 0) {
    // s = d family.
    double logd = std::log(static_cast<double>(p.d));
    bool at_top = p.ebeta_exact ? (*p.ebeta_exact == Rational(p.d))
                                : std::abs(p.beta_value - logd) < 1e-12;
    if (at_top) {
      v.type = FactorType::PowersIIILambda;
      v.lambda_exact = Rational(1, p.d);
      v.lambda_value = 1.0 / static_cast<double>(p.d);
      v.flow.kind = ReducedFlow::Kind::Trivial;
      return v;
    }
    if (!std::holds_alternative<SdBoundaryDatum>(datum.family))
      throw std::invalid_argument(
          "classify: s = d below log d requires a boundary-point datum");
    const auto& b = std::get<SdBoundaryDatum>(datum.family);
    if (b.y.coord(0) != 1)
      throw std::invalid_argument("classify: boundary point must lie in C_1");
    v.type = FactorType::IIOne;
    v.flow.kind = ReducedFlow::Kind::TranslationZ;
    // finite trace mass e^beta (d - e^beta)/(d - 1)
    if (p.ebeta_exact) {
      Rational eb = *p.ebeta_exact;
      v.trace_mass_exact = eb * (Rational(p.d) - eb) / Rational(p.d - 1);
      v.trace_mass = v.trace_mass_exact->to_double();
    } else {
      double eb = std::exp(p.beta_value);
      v.trace_mass = eb * (static_cast<double>(p.d) - eb) /
                     static_cast<double>(p.d - 1);
    }
    return v;
  }

  if (p.t == p.s) {
    // Shift-invariant branch at the forced temperature log(d/2).
    if (const auto* si = std::get_if<ShiftInvariantDatum>(&datum.family)) {
      v.flow.kind = ReducedFlow::Kind::ShiftTwoSided;
      v.flow.descriptor = si->descriptor;
      if (si->atomic_periodic && si->period >= 1) {
        v.type = FactorType::PowersIIILambda;
        v.lambda_exact = Rational(2, p.d).pow(si->period);
        v.lambda_value = v.lambda_exact->to_double();
        v.flow.kind = ReducedFlow::Kind::FiniteCycle;
        v.flow.cycle_length = si->period;
      }
      return v;
    }
    if (std::holds_alternative<CoboundaryDatum>(datum.family)) {
      v.type = FactorType::IIIZero;
      v.flow.kind = ReducedFlow::Kind::SubshiftMeasure;
      v.flow.descriptor = std::get<CoboundaryDatum>(datum.family).subshift;
      return v;
    }
    throw std::invalid_argument("classify: unsupported family for s = t");
  }

  // 1 <= t < s from here on.
  if (const auto* po = std::get_if<PeriodicOrbitDatum>(&datum.family)) {
    PeriodCheck pc = minimal_period(po->y, std::max<long long>(po->period, 64));
    if (!pc.period || (po->period > 0 && *pc.period != po->period))
      throw std::invalid_argument("classify: stated period does not hold");
    long long n = *pc.period;
    Word orbit = po->y.window(0, n);
    Rational q(digit_sum(orbit), n);
    if (p.q_exact && *p.q_exact != q)
      throw std::invalid_argument(
          "classify: beta does not match the orbit's forced temperature");
    v.type = FactorType::PowersIIILambda;
    v.lambda_exact = detail::orbit_lambda_product(orbit, p.s, p.t);
    v.lambda_value = v.lambda_exact->to_double();
    v.flow.kind = ReducedFlow::Kind::FiniteCycle;
    v.flow.cycle_length = n;
    return v;
  }
  if (const auto* ao = std::get_if<AperiodicOrbitDatum>(&datum.family)) {
    ConditionCReport c = check_condition_C(ao->z, p, ao->window);
    if (c.verdict != ConditionCReport::Verdict::Satisfied)
      throw std::invalid_argument(
          "classify: summability condition not certified on the window");
    v.type = FactorType::SemifiniteOpen;
    v.flow.kind = ReducedFlow::Kind::TranslationZ;
    v.flow.descriptor = "orbit of z";
    return v;
  }
  if (std::holds_alternative<BernoulliPointDatum>(datum.family)) {
    v.type = FactorType::NotExtremeSemifinite;
    v.flow.kind = ReducedFlow::Kind::ShiftTwoSided;
    v.flow.descriptor = "skewed two-sided Bernoulli";
    return v;
  }
  if (std::holds_alternative<CoboundaryDatum>(datum.family)) {
    v.type = FactorType::IIIZero;
    v.flow.kind = ReducedFlow::Kind::SubshiftMeasure;
    v.flow.descriptor = std::get<CoboundaryDatum>(datum.family).subshift;
    return v;
  }
  throw std::invalid_argument("classify: family inconsistent with parameters");
}

}  // namespace tailflow
