#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "tailflow/cocycle.hpp"
#include "tailflow/kms.hpp"
#include "tailflow/sequence.hpp"
#include "tailflow/weight.hpp"
#include "tailflow/word.hpp"

namespace tailflow {

/// One atom of an atomic measure. `mass` is the normalized probability mass;
/// `raw` is the unnormalized exact weight when the measure was built in exact
/// mode (all atoms then share the normalizer, so identities can be checked on
/// raw weights without dividing).
struct Atom {
  BiSeq point;
  double mass = 0.0;
  std::optional<ExactWeight> raw;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;
  bool normalized = true;
  double truncated_mass = 0.0;  // probability mass outside the listed atoms
  bool exact = false;
  Rational lambda{1};  // base of the raw weights when exact
};

/// Product measure with marginal masses (p, 1-p) per coordinate. One-sided on
/// {0,1}^{N_0} by default; `two_sided` admits negative coordinates too.
struct BernoulliMeasure {
  double p = 0.5;
  std::optional<Rational> p_exact;
  bool two_sided = false;
};

/// Dense masses over the full window [start, start + depth); index bits read
/// the word with its first symbol as the most significant bit. Exact weights,
/// when present, are unnormalized and share one normalizer.
struct CylinderTableMeasure {
  long long start = 0;
  int depth = 0;
  std::vector<double> masses;
  std::optional<std::vector<ExactWeight>> exact;
  Rational lambda{1};
};

using MeasureRep =
    std::variant<AtomicMeasure, BernoulliMeasure, CylinderTableMeasure>;

inline std::size_t word_index(const Word& w) {
  std::size_t i = 0;
  for (auto b : w) i = (i << 1) | b;
  return i;
}

inline Word index_word(std::size_t i, int len) {
  Word w(static_cast<std::size_t>(len));
  for (int j = len - 1; j >= 0; --j) {
    w[static_cast<std::size_t>(j)] = i & 1;
    i >>= 1;
  }
  return w;
}

/// mu(C) for the cylinder {x : x_{start+j} = word_j}.
inline double cylinder_mass(const MeasureRep& mu, long long start,
                            const Word& w) {
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    double m = 0.0;
    for (const auto& atom : a->atoms)
      if (atom.point.window(start, start + static_cast<long long>(w.size())) == w)
        m += atom.mass;
    return m;
  }
  if (const auto* b = std::get_if<BernoulliMeasure>(&mu)) {
    if (!b->two_sided && start < 0)
      throw std::invalid_argument(
          "cylinder_mass: negative coordinates on a one-sided measure");
    double m = 1.0;
    for (auto bit : w) m *= bit ? (1.0 - b->p) : b->p;
    return m;
  }
  const auto& t = std::get<CylinderTableMeasure>(mu);
  long long len = static_cast<long long>(w.size());
  if (start < t.start || start + len > t.start + t.depth)
    throw std::invalid_argument("cylinder_mass: window outside the table");
  int off = static_cast<int>(start - t.start);
  double m = 0.0;
  for (std::size_t i = 0; i < t.masses.size(); ++i) {
    bool match = true;
    for (long long j = 0; j < len; ++j) {
      int bit = (i >> (t.depth - 1 - off - j)) & 1;
      if (bit != w[static_cast<std::size_t>(j)]) { match = false; break; }
    }
    if (match) m += t.masses[i];
  }
  return m;
}

/// Unnormalized exact mass of a cylinder for exact atomic/table measures.
inline WeightSum exact_cylinder_mass(const MeasureRep& mu, long long start,
                                     const Word& w) {
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    if (!a->exact)
      throw std::invalid_argument("exact_cylinder_mass: measure is not exact");
    WeightSum s(a->lambda);
    for (const auto& atom : a->atoms)
      if (atom.point.window(start, start + static_cast<long long>(w.size())) == w)
        s.add(*atom.raw);
    return s;
  }
  if (const auto* t = std::get_if<CylinderTableMeasure>(&mu)) {
    if (!t->exact)
      throw std::invalid_argument("exact_cylinder_mass: measure is not exact");
    long long len = static_cast<long long>(w.size());
    if (start < t->start || start + len > t->start + t->depth)
      throw std::invalid_argument("exact_cylinder_mass: window outside table");
    int off = static_cast<int>(start - t->start);
    WeightSum s(t->lambda);
    for (std::size_t i = 0; i < t->exact->size(); ++i) {
      bool match = true;
      for (long long j = 0; j < len; ++j) {
        int bit = (i >> (t->depth - 1 - off - j)) & 1;
        if (bit != w[static_cast<std::size_t>(j)]) { match = false; break; }
      }
      if (match) s.add((*t->exact)[i]);
    }
    return s;
  }
  throw std::invalid_argument("exact_cylinder_mass: unsupported representation");
}

/// Integral of the cylinder function sum_w f(w) chi_{C_w at start}.
inline double integrate(const MeasureRep& mu, long long start,
                        const std::map<Word, double>& f) {
  double v = 0.0;
  for (const auto& [w, c] : f) v += c * cylinder_mass(mu, start, w);
  return v;
}

inline BernoulliMeasure bernoulli_b_p(const Rational& p, bool two_sided = false) {
  if (p < Rational(0) || p > Rational(1))
    throw std::invalid_argument("bernoulli_b_p: p outside [0,1]");
  BernoulliMeasure b;
  b.p = p.to_double();
  b.p_exact = p;
  b.two_sided = two_sided;
  return b;
}

inline BernoulliMeasure bernoulli_b_p(double p, bool two_sided = false) {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("bernoulli_b_p: p outside [0,1]");
  BernoulliMeasure b;
  b.p = p;
  b.two_sided = two_sided;
  return b;
}

/// Bernoulli measure at the branch-prescribed p = (e^beta - t)/(s - t).
inline BernoulliMeasure bernoulli_for(const KmsParams& params) {
  if (!params.p_defined)
    throw std::invalid_argument("bernoulli_for: p undefined (s = t)");
  if (params.p_exact) return bernoulli_b_p(*params.p_exact);
  return bernoulli_b_p(params.p_value);
}

/// m_{p,y} = (1-p) sum_n p^n delta_{0^n y}, truncated after `count` atoms.
/// The discarded mass p^count is reported, not renormalized away.
inline AtomicMeasure m_p_y(const Rational& p, const BiSeq& y, int count) {
  if (!(Rational(0) < p) || !(p < Rational(1)))
    throw std::invalid_argument("m_p_y: p must be in (0,1)");
  if (y.coord(0) != 1) throw std::invalid_argument("m_p_y: y must lie in C_1");
  if (count < 1) throw std::invalid_argument("m_p_y: count must be >= 1");
  AtomicMeasure m;
  m.exact = true;
  m.lambda = Rational(1);
  Rational w = Rational(1) - p;
  for (int n = 0; n < count; ++n) {
    Atom a{n == 0 ? y : BiSeq::zero_prefixed(Word(static_cast<std::size_t>(n), 0), y),
           w.to_double(), ExactWeight(w, Rational(1), Rational(0))};
    m.atoms.push_back(std::move(a));
    w *= p;
  }
  m.truncated_mass = w.to_double();  // p^count
  return m;
}

/// Result of the periodic-orbit measure nu_y: atoms on the orbit of y with
/// exact weights lambda^{c_k(y)}, plus the beta value the orbit forces.
struct NuPeriodic {
  AtomicMeasure measure;
  BetaSpec forced_beta;
  Rational q{0};
  long long period = 0;
};

inline NuPeriodic nu_periodic(const BiSeq& y, const KmsParams& params,
                              long long max_period = 64) {
  if (params.t < 1 || params.t >= params.s)
    throw std::invalid_argument("nu_periodic: requires 0 < t < s");
  PeriodCheck pc = minimal_period(y, max_period);
  if (!pc.period) throw std::invalid_argument("nu_periodic: y is not periodic");
  long long n = *pc.period;
  long long sum = digit_sum(y.window(0, n));
  NuPeriodic out;
  out.period = n;
  out.q = Rational(sum, n);
  out.forced_beta = BetaSpec::affine(Rational(1) - out.q);
  Rational lambda(params.t, params.s);
  AtomicMeasure& m = out.measure;
  m.exact = true;
  m.lambda = lambda;
  double norm = 0.0;
  std::vector<ExactWeight> raw;
  for (long long k = 0; k < n; ++k) {
    Rational ck = cocycle(y, k, out.q).exact_value;
    raw.emplace_back(Rational(1), lambda, ck);
    norm += raw.back().eval();
  }
  for (long long k = 0; k < n; ++k) {
    m.atoms.push_back(Atom{y.shifted(k), raw[static_cast<std::size_t>(k)].eval() / norm,
                           raw[static_cast<std::size_t>(k)]});
  }
  return out;
}

/// Truncated aperiodic family nu_{beta,z,n} on {sigma^k z : |k| <= n}, with
/// the total-variation defect of the quasi-invariance relation both from the
/// closed formula and from direct atom comparison.
struct NuTruncated {
  AtomicMeasure measure;
  double tv_defect = 0.0;         // (lambda^{c_{-n}} + lambda^{c_{n+1}})/norm
  double tv_defect_direct = 0.0;  // direct evaluation of the same norm
};

inline NuTruncated nu_aperiodic_truncated(const BiSeq& z,
                                          const KmsParams& params,
                                          long long n) {
  if (params.t < 1 || params.t >= params.s)
    throw std::invalid_argument("nu_aperiodic_truncated: requires 0 < t < s");
  if (n < 0) throw std::invalid_argument("nu_aperiodic_truncated: n >= 0");
  Rational lambda(params.t, params.s);
  double lam = lambda.to_double();
  bool exact_q = params.q_exact.has_value();
  double q = params.q_value;

  auto weight_at = [&](long long k) {
    double c = exact_q ? cocycle(z, k, *params.q_exact).value
                       : cocycle(z, k, q).value;
    return std::pow(lam, c);
  };

  NuTruncated out;
  AtomicMeasure& m = out.measure;
  m.exact = exact_q;
  m.lambda = lambda;
  double norm = 0.0;
  std::vector<double> w(static_cast<std::size_t>(2 * n + 1));
  for (long long k = -n; k <= n; ++k) {
    w[static_cast<std::size_t>(k + n)] = weight_at(k);
    norm += w[static_cast<std::size_t>(k + n)];
  }
  for (long long k = -n; k <= n; ++k) {
    Atom a{z.shifted(k), w[static_cast<std::size_t>(k + n)] / norm, std::nullopt};
    if (exact_q)
      a.raw = ExactWeight(Rational(1), lambda,
                          cocycle(z, k, *params.q_exact).exact_value);
    m.atoms.push_back(std::move(a));
  }
  out.tv_defect = (weight_at(-n) + weight_at(n + 1)) / norm;

  // Direct route: atoms of nu∘sigma sit at sigma^{k-1} z with weight w_k;
  // atoms of lambda^{c_1} nu sit at sigma^k z with weight w_k lambda^{z_k - q}.
  std::map<long long, double> diff;
  for (long long k = -n; k <= n; ++k) {
    diff[k - 1] += w[static_cast<std::size_t>(k + n)] / norm;
    double zq = static_cast<double>(z.coord(k)) - q;
    diff[k] -= w[static_cast<std::size_t>(k + n)] * std::pow(lam, zq) / norm;
  }
  double tv = 0.0;
  for (const auto& [k, v] : diff) tv += std::abs(v);
  out.tv_defect_direct = tv;
  return out;
}

/// Residual of the quasi-invariance equation d(nu∘sigma)/dnu = lambda^{x_0-q},
/// with the convention nu∘sigma(A) = nu(sigma(A)). Checked on all cylinders
/// C_w at start 0, depths 1..depth, against sigma(C_w at 0) = C_w at -1.
/// `exact_zero` certifies an exactly vanishing residual in rational mode.
struct QiResidual {
  double value = 0.0;
  bool exact_zero = false;
};

inline QiResidual quasi_invariance_residual(
    const MeasureRep& nu, double lambda, double q, int depth,
    std::optional<Rational> lambda_exact = std::nullopt,
    std::optional<Rational> q_exact = std::nullopt) {
  bool measure_exact = false;
  if (const auto* a = std::get_if<AtomicMeasure>(&nu)) measure_exact = a->exact;
  if (const auto* t = std::get_if<CylinderTableMeasure>(&nu))
    measure_exact = t->exact.has_value();
  bool try_exact = measure_exact && lambda_exact && q_exact;

  QiResidual r;
  r.exact_zero = try_exact;
  for (int D = 1; D <= depth; ++D) {
    for (std::size_t i = 0; i < (static_cast<std::size_t>(1) << D); ++i) {
      Word w = index_word(i, D);
      double lhs = cylinder_mass(nu, -1, w);
      double rhs = std::pow(lambda, static_cast<double>(w[0]) - q) *
                   cylinder_mass(nu, 0, w);
      r.value = std::max(r.value, std::abs(lhs - rhs));
      if (r.exact_zero) {
        WeightSum le = exact_cylinder_mass(nu, -1, w);
        WeightSum re = exact_cylinder_mass(nu, 0, w);
        re.scale(ExactWeight(Rational(1), *lambda_exact,
                             Rational(w[0]) - *q_exact));
        if (le != re) r.exact_zero = false;
      }
    }
  }
  if (r.exact_zero) r.value = 0.0;
  return r;
}

inline QiResidual quasi_invariance_residual(const MeasureRep& nu,
                                            const KmsParams& params,
                                            int depth) {
  double lam = params.lambda_defined ? params.lambda.to_double() : 1.0;
  std::optional<Rational> le =
      params.lambda_defined ? std::optional<Rational>(params.lambda) : std::nullopt;
  return quasi_invariance_residual(nu, lam, params.q_value, depth, le,
                                   params.q_exact);
}

/// Residual of e^{-beta} ∫ (s chi_0⊗f + t chi_1⊗f) dmu = ∫ f dmu over the
/// cylinder basis of depth <= depth (the empty word included).
inline double pf4_residual(const MeasureRep& mu, const KmsParams& params,
                           int depth) {
  double embeta = params.ebeta_exact
                      ? 1.0 / params.ebeta_exact->to_double()
                      : std::exp(-params.beta_value);
  double res = 0.0;
  for (int D = 0; D <= depth; ++D) {
    for (std::size_t i = 0; i < (static_cast<std::size_t>(1) << D); ++i) {
      Word w = index_word(i, D);
      Word w0 = concat(Word{0}, w);
      Word w1 = concat(Word{1}, w);
      double lhs = embeta * (static_cast<double>(params.s) * cylinder_mass(mu, 0, w0) +
                             static_cast<double>(params.t) * cylinder_mass(mu, 0, w1));
      double rhs = cylinder_mass(mu, 0, w);
      res = std::max(res, std::abs(lhs - rhs));
    }
  }
  return res;
}

struct PfReport {
  double pf1_residual = 0.0;
  double pf2_residual = 0.0;
  int depth = 0;
};

/// tau is given as trace_mass_scale times the probability measure mu.
inline PfReport pf1_pf2_check(const KmsParams& params, const MeasureRep& mu,
                              int depth,
                              std::optional<double> trace_mass_scale = std::nullopt) {
  PfReport r;
  r.depth = depth;
  double scale = trace_mass_scale.value_or(params.trace_mass);
  double embeta = params.ebeta_exact
                      ? 1.0 / params.ebeta_exact->to_double()
                      : std::exp(-params.beta_value);
  if (!trace_mass_scale && params.ebeta_exact && params.trace_mass_exact) {
    // e^{-beta} d tau(1) with tau(1) = e^beta/d is exactly 1.
    Rational pf1 = Rational(1) / *params.ebeta_exact * Rational(params.d) *
                   *params.trace_mass_exact;
    r.pf1_residual = (pf1 - Rational(1)).abs().to_double();
  } else {
    r.pf1_residual =
        std::abs(embeta * static_cast<double>(params.d) * scale - 1.0);
  }
  r.pf2_residual = pf4_residual(mu, params, depth);
  return r;
}

/// One-sided -> two-sided extension via the weights r_0 = (s/e^beta) chi_0 +
/// (t/e^beta) chi_1 on the negative coordinates: the mass of the cylinder w
/// on [-m, k) is prod_{i<m} r_0(w_i) times mu(C_w at 0).
inline CylinderTableMeasure extend_to_two_sided(const MeasureRep& mu,
                                                const KmsParams& params,
                                                int left_depth, int right_depth,
                                                double tol = 1e-9) {
  int D = left_depth + right_depth;
  if (left_depth < 0 || right_depth < 0 || D < 1 || D > 24)
    throw std::invalid_argument("extend_to_two_sided: bad depths");
  if (pf4_residual(mu, params, D) > tol)
    throw std::domain_error(
        "extend_to_two_sided: mu does not satisfy the branch equation within "
        "tolerance; the extension states would be inconsistent");
  double embeta = params.ebeta_exact
                      ? 1.0 / params.ebeta_exact->to_double()
                      : std::exp(-params.beta_value);
  double r0[2] = {static_cast<double>(params.s) * embeta,
                  static_cast<double>(params.t) * embeta};
  CylinderTableMeasure out;
  out.start = -left_depth;
  out.depth = D;
  out.masses.resize(static_cast<std::size_t>(1) << D);
  for (std::size_t i = 0; i < out.masses.size(); ++i) {
    Word w = index_word(i, D);
    double f = 1.0;
    for (int j = 0; j < left_depth; ++j) f *= r0[w[static_cast<std::size_t>(j)]];
    out.masses[i] = f * cylinder_mass(mu, 0, w);
  }
  return out;
}

/// (1/2) sum |difference| over a common cylinder window, or exact atom
/// matching (by window comparison) for two atomic measures.
inline double tv_distance(const MeasureRep& a, const MeasureRep& b, int depth) {
  const auto* aa = std::get_if<AtomicMeasure>(&a);
  const auto* ab = std::get_if<AtomicMeasure>(&b);
  if (aa && ab) {
    std::map<Word, double> m;
    for (const auto& atom : aa->atoms)
      m[atom.point.window(-depth, depth)] += atom.mass;
    for (const auto& atom : ab->atoms)
      m[atom.point.window(-depth, depth)] -= atom.mass;
    double tv = 0.0;
    for (const auto& [w, v] : m) tv += std::abs(v);
    return tv / 2.0;
  }
  long long start = 0;
  int D = depth;
  auto clip = [&](const MeasureRep& mu) {
    if (const auto* t = std::get_if<CylinderTableMeasure>(&mu)) {
      long long lo = std::max(start, t->start);
      long long hi = std::min(start + D, t->start + t->depth);
      if (hi <= lo)
        throw std::invalid_argument("tv_distance: disjoint windows");
      start = lo;
      D = static_cast<int>(hi - lo);
    } else if (const auto* bb = std::get_if<BernoulliMeasure>(&mu)) {
      if (!bb->two_sided && start < 0) {
        D -= static_cast<int>(-start);
        start = 0;
        if (D < 1) throw std::invalid_argument("tv_distance: empty window");
      }
    }
  };
  clip(a);
  clip(b);
  double tv = 0.0;
  for (std::size_t i = 0; i < (static_cast<std::size_t>(1) << D); ++i) {
    Word w = index_word(i, D);
    tv += std::abs(cylinder_mass(a, start, w) - cylinder_mass(b, start, w));
  }
  return tv / 2.0;
}

/// Reweights a shift-invariant cylinder table by lambda^h for a transfer
/// function h on central word classes: the measure lambda^h nu_0 normalized.
/// The table window must contain h's central window; entries with positive
/// mass whose central class h never saw are an error.
inline CylinderTableMeasure coboundary_measure(const CylinderTableMeasure& nu0,
                                               const TransferFunction& h,
                                               const Rational& lambda) {
  if (nu0.start > -h.depth || nu0.start + nu0.depth < h.depth)
    throw std::invalid_argument(
        "coboundary_measure: table window does not cover the class window");
  double lam = lambda.to_double();
  CylinderTableMeasure out;
  out.start = nu0.start;
  out.depth = nu0.depth;
  out.lambda = lambda;
  out.masses.resize(nu0.masses.size(), 0.0);
  bool exact = h.exact && nu0.exact.has_value();
  if (exact)
    out.exact = std::vector<ExactWeight>(
        nu0.masses.size(), ExactWeight(Rational(0), lambda, Rational(0)));
  int off = static_cast<int>(-h.depth - nu0.start);
  double total = 0.0;
  for (std::size_t i = 0; i < nu0.masses.size(); ++i) {
    if (nu0.masses[i] == 0.0 && (!exact || (*nu0.exact)[i].coeff.is_zero()))
      continue;
    Word w = index_word(i, nu0.depth);
    Word cls(w.begin() + off, w.begin() + off + 2 * h.depth);
    auto it = h.table.find(cls);
    if (it == h.table.end())
      throw std::domain_error(
          "coboundary_measure: positive-mass word outside the solved classes");
    out.masses[i] = nu0.masses[i] * std::pow(lam, it->second);
    total += out.masses[i];
    if (exact) {
      ExactWeight ew = (*nu0.exact)[i];
      (*out.exact)[i] =
          ExactWeight(ew.coeff, lambda, ew.exponent + h.exact_table.at(cls));
    }
  }
  for (auto& m : out.masses) m /= total;
  return out;
}

}  // namespace tailflow
