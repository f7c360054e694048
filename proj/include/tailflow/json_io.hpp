#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "tailflow/classify.hpp"
#include "tailflow/kms.hpp"
#include "tailflow/markov.hpp"
#include "tailflow/measure.hpp"
#include "tailflow/sequence.hpp"

namespace tailflow {

using Json = nlohmann::ordered_json;

/// Schema identifiers; versioned copies live under docs/schemas.
inline constexpr const char* kSchemaSequence = "tailflow.sequence.v1";
inline constexpr const char* kSchemaParams = "tailflow.params.v1";
inline constexpr const char* kSchemaMeasure = "tailflow.measure.v1";
inline constexpr const char* kSchemaDatum = "tailflow.datum.v1";
inline constexpr const char* kSchemaVerdict = "tailflow.verdict.v1";
inline constexpr const char* kSchemaMatrix = "tailflow.matrix.v1";
inline constexpr const char* kSchemaBoundary = "tailflow.boundary.v1";
inline constexpr const char* kSchemaRange = "tailflow.range.v1";

class JsonError : public std::runtime_error {
public:
  explicit JsonError(const std::string& what) : std::runtime_error(what) {}
};

namespace jsond {

inline Rational rational(const Json& j, const char* where) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) {
    auto r = Rational::parse(j.get<std::string>());
    if (r) return *r;
  }
  throw JsonError(std::string(where) + ": expected integer or \"a/b\" string");
}

inline const Json& field(const Json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end())
    throw JsonError(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

}  // namespace jsond

// --- sequences -------------------------------------------------------------

inline Json seq_to_json(const BiSeq& z);

namespace jsond {

inline Json seq_body(const BiSeq::Rep& rep) {
  Json j;
  if (const auto* ep = std::get_if<BiSeq::EventuallyPeriodic>(&rep)) {
    j["kind"] = "eventuallyPeriodic";
    j["left"] = word_str(ep->left);
    j["core"] = word_str(ep->core);
    j["right"] = word_str(ep->right);
    j["origin"] = ep->origin;
  } else if (const auto* su = std::get_if<BiSeq::Substitution>(&rep)) {
    j["kind"] = "substitution";
    j["rule0"] = word_str(su->rule[0]);
    j["rule1"] = word_str(su->rule[1]);
    j["seedLeft"] = static_cast<int>(su->seed_left);
    j["seedRight"] = static_cast<int>(su->seed_right);
  } else if (const auto* tp = std::get_if<BiSeq::Toeplitz>(&rep)) {
    j["kind"] = "toeplitz";
    j["k"] = tp->k;
  } else {
    const auto& zp = std::get<BiSeq::ZeroPrefixed>(rep);
    j["kind"] = "zeroPrefixed";
    j["prefix"] = word_str(zp.prefix);
    j["base"] = seq_to_json(*zp.base);
  }
  return j;
}

}  // namespace jsond

inline Json seq_to_json(const BiSeq& z) {
  Json j = jsond::seq_body(z.rep());
  j["shift"] = z.offset();
  j["schema"] = kSchemaSequence;
  return j;
}

inline BiSeq seq_from_json(const Json& j) {
  if (!j.is_object()) throw JsonError("sequence: expected object");
  std::string kind = jsond::field(j, "kind", "sequence").get<std::string>();
  long long shift = j.value("shift", 0LL);
  try {
    if (kind == "eventuallyPeriodic") {
      return BiSeq::eventually_periodic(
                 parse_word(jsond::field(j, "left", "sequence").get<std::string>()),
                 parse_word(j.value("core", std::string())),
                 parse_word(jsond::field(j, "right", "sequence").get<std::string>()),
                 j.value("origin", 0LL))
          .shifted(shift);
    }
    if (kind == "periodic") {
      return BiSeq::periodic(
                 parse_word(jsond::field(j, "word", "sequence").get<std::string>()),
                 j.value("origin", 0LL))
          .shifted(shift);
    }
    if (kind == "substitution") {
      return BiSeq::substitution(
                 {parse_word(jsond::field(j, "rule0", "sequence").get<std::string>()),
                  parse_word(jsond::field(j, "rule1", "sequence").get<std::string>())},
                 static_cast<std::uint8_t>(j.value("seedLeft", 0)),
                 static_cast<std::uint8_t>(j.value("seedRight", 0)))
          .shifted(shift);
    }
    if (kind == "thueMorse") return BiSeq::thue_morse().shifted(shift);
    if (kind == "toeplitz") {
      return BiSeq::toeplitz(
                 jsond::field(j, "k", "sequence").get<std::vector<long long>>())
          .shifted(shift);
    }
    if (kind == "zeroPrefixed") {
      return BiSeq::zero_prefixed(
                 parse_word(jsond::field(j, "prefix", "sequence").get<std::string>()),
                 seq_from_json(jsond::field(j, "base", "sequence")))
          .shifted(shift);
    }
  } catch (const std::invalid_argument& e) {
    throw JsonError(std::string("sequence: ") + e.what());
  }
  throw JsonError("sequence: unknown kind '" + kind + "'");
}

// --- parameters ------------------------------------------------------------

inline Json beta_to_json(const BetaSpec& b) {
  Json j;
  switch (b.kind) {
    case BetaSpec::Kind::Float:
      j["kind"] = "float";
      j["value"] = b.fval;
      break;
    case BetaSpec::Kind::LogOf:
      j["kind"] = "logOf";
      j["value"] = b.r.str();
      break;
    case BetaSpec::Kind::Affine:
      j["kind"] = "affine";
      j["x"] = b.r.str();
      break;
  }
  return j;
}

inline BetaSpec beta_from_json(const Json& j) {
  if (j.is_number()) return BetaSpec::of(j.get<double>());
  std::string kind = jsond::field(j, "kind", "beta").get<std::string>();
  if (kind == "float")
    return BetaSpec::of(jsond::field(j, "value", "beta").get<double>());
  if (kind == "logOf")
    return BetaSpec::log_of(jsond::rational(jsond::field(j, "value", "beta"), "beta"));
  if (kind == "affine")
    return BetaSpec::affine(jsond::rational(jsond::field(j, "x", "beta"), "beta"));
  throw JsonError("beta: unknown kind '" + kind + "'");
}

/// Parses "log(3/2)", "x*logs+(1-x)*logt" shorthand "affine:1/2", or a float.
inline BetaSpec beta_from_string(const std::string& s) {
  if (s.rfind("log(", 0) == 0 && s.back() == ')') {
    auto r = Rational::parse(s.substr(4, s.size() - 5));
    if (!r) throw JsonError("beta: bad log() argument");
    return BetaSpec::log_of(*r);
  }
  if (s.rfind("affine:", 0) == 0) {
    auto r = Rational::parse(s.substr(7));
    if (!r) throw JsonError("beta: bad affine argument");
    return BetaSpec::affine(*r);
  }
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos == s.size()) return BetaSpec::of(v);
  } catch (const std::exception&) {
  }
  throw JsonError("beta: cannot parse '" + s + "'");
}

inline Json params_to_json(const KmsParams& p) {
  Json j;
  j["schema"] = kSchemaParams;
  j["d"] = p.d;
  j["s"] = p.s;
  j["t"] = p.t;
  j["beta"] = beta_to_json(p.beta);
  j["betaValue"] = p.beta_value;
  j["arithmeticMode"] = p.ebeta_exact || p.q_exact ? "exact" : "float";
  if (p.lambda_defined) j["lambda"] = p.lambda.str();
  if (p.q_defined) {
    j["q"] = p.q_value;
    if (p.q_exact) j["qExact"] = p.q_exact->str();
  }
  if (p.p_defined) {
    j["p"] = p.p_value;
    if (p.p_exact) j["pExact"] = p.p_exact->str();
  }
  j["traceMass"] = p.trace_mass;
  if (p.trace_mass_exact) j["traceMassExact"] = p.trace_mass_exact->str();
  return j;
}

inline KmsParams params_from_json(const Json& j) {
  long long d = jsond::field(j, "d", "params").get<long long>();
  long long s = jsond::field(j, "s", "params").get<long long>();
  BetaSpec beta = beta_from_json(jsond::field(j, "beta", "params"));
  try {
    return derive(d, s, beta);
  } catch (const std::invalid_argument& e) {
    throw JsonError(std::string("params: ") + e.what());
  }
}

// --- measures --------------------------------------------------------------

inline Json weight_to_json(const ExactWeight& w) {
  Json j;
  j["coeff"] = w.coeff.str();
  j["exponent"] = w.exponent.str();
  return j;
}

inline Json measure_to_json(const MeasureRep& mu) {
  Json j;
  j["schema"] = kSchemaMeasure;
  if (const auto* b = std::get_if<BernoulliMeasure>(&mu)) {
    j["kind"] = "bernoulli";
    j["p"] = b->p;
    if (b->p_exact) j["pExact"] = b->p_exact->str();
    j["twoSided"] = b->two_sided;
    return j;
  }
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    j["kind"] = "atomic";
    j["normalized"] = a->normalized;
    j["truncatedMass"] = a->truncated_mass;
    j["exact"] = a->exact;
    if (a->exact) j["lambda"] = a->lambda.str();
    Json atoms = Json::array();
    for (const auto& atom : a->atoms) {
      Json aj;
      aj["point"] = seq_to_json(atom.point);
      aj["mass"] = atom.mass;
      if (atom.raw) aj["raw"] = weight_to_json(*atom.raw);
      atoms.push_back(std::move(aj));
    }
    j["atoms"] = std::move(atoms);
    return j;
  }
  const auto& t = std::get<CylinderTableMeasure>(mu);
  j["kind"] = "cylinderTable";
  j["start"] = t.start;
  j["depth"] = t.depth;
  j["masses"] = t.masses;
  if (t.exact) {
    j["lambda"] = t.lambda.str();
    Json ex = Json::array();
    for (const auto& w : *t.exact) ex.push_back(weight_to_json(w));
    j["exact"] = std::move(ex);
  }
  return j;
}

inline ExactWeight weight_from_json(const Json& j, const Rational& lambda) {
  return ExactWeight(jsond::rational(jsond::field(j, "coeff", "weight"), "weight"),
                     lambda,
                     jsond::rational(jsond::field(j, "exponent", "weight"), "weight"));
}

inline MeasureRep measure_from_json(const Json& j) {
  std::string kind = jsond::field(j, "kind", "measure").get<std::string>();
  if (kind == "bernoulli") {
    BernoulliMeasure b;
    auto pj = jsond::field(j, "p", "measure");
    if (j.contains("pExact")) {
      b.p_exact = jsond::rational(j["pExact"], "measure");
      b.p = b.p_exact->to_double();
    } else {
      b.p = pj.get<double>();
    }
    b.two_sided = j.value("twoSided", false);
    if (b.p < 0.0 || b.p > 1.0) throw JsonError("measure: p outside [0,1]");
    return b;
  }
  if (kind == "atomic") {
    AtomicMeasure a;
    a.normalized = j.value("normalized", true);
    a.truncated_mass = j.value("truncatedMass", 0.0);
    a.exact = j.value("exact", false);
    if (a.exact)
      a.lambda = jsond::rational(jsond::field(j, "lambda", "measure"), "measure");
    for (const auto& aj : jsond::field(j, "atoms", "measure")) {
      Atom atom{seq_from_json(jsond::field(aj, "point", "atom")),
                jsond::field(aj, "mass", "atom").get<double>(), std::nullopt};
      if (aj.contains("raw")) atom.raw = weight_from_json(aj["raw"], a.lambda);
      a.atoms.push_back(std::move(atom));
    }
    return a;
  }
  if (kind == "cylinderTable") {
    CylinderTableMeasure t;
    t.start = jsond::field(j, "start", "measure").get<long long>();
    t.depth = jsond::field(j, "depth", "measure").get<int>();
    t.masses = jsond::field(j, "masses", "measure").get<std::vector<double>>();
    if (t.depth < 1 || t.depth > 24 ||
        t.masses.size() != (static_cast<std::size_t>(1) << t.depth))
      throw JsonError("measure: masses length does not match depth");
    if (j.contains("exact")) {
      t.lambda = jsond::rational(jsond::field(j, "lambda", "measure"), "measure");
      std::vector<ExactWeight> ex;
      for (const auto& wj : j["exact"]) ex.push_back(weight_from_json(wj, t.lambda));
      if (ex.size() != t.masses.size())
        throw JsonError("measure: exact weights length mismatch");
      t.exact = std::move(ex);
    }
    return t;
  }
  throw JsonError("measure: unknown kind '" + kind + "'");
}

// --- classify --------------------------------------------------------------

inline KmsDatum datum_from_json(const Json& j) {
  KmsDatum d;
  d.params = params_from_json(jsond::field(j, "params", "datum"));
  const Json& f = jsond::field(j, "family", "datum");
  std::string kind = jsond::field(f, "kind", "family").get<std::string>();
  if (kind == "periodicOrbit") {
    d.family = PeriodicOrbitDatum{seq_from_json(jsond::field(f, "y", "family")),
                                  f.value("period", 0LL)};
  } else if (kind == "aperiodicOrbit") {
    d.family = AperiodicOrbitDatum{seq_from_json(jsond::field(f, "z", "family")),
                                   f.value("window", 2048LL)};
  } else if (kind == "bernoulli") {
    d.family = BernoulliPointDatum{};
  } else if (kind == "shiftInvariant") {
    d.family = ShiftInvariantDatum{f.value("descriptor", std::string()),
                                   f.value("atomicPeriodic", false),
                                   f.value("period", 0LL)};
  } else if (kind == "coboundary") {
    d.family = CoboundaryDatum{f.value("subshift", std::string("thue-morse"))};
  } else if (kind == "sdBoundary") {
    d.family = SdBoundaryDatum{seq_from_json(jsond::field(f, "y", "family"))};
  } else if (kind == "gicar") {
    d.family = GicarDatum{};
  } else {
    throw JsonError("family: unknown kind '" + kind + "'");
  }
  return d;
}

inline Json verdict_to_json(const FactorVerdict& v) {
  Json j;
  j["schema"] = kSchemaVerdict;
  if (v.type) {
    j["type"] = factor_type_label(*v.type);
    if (v.lambda_exact) j["lambdaExact"] = v.lambda_exact->str();
    if (v.lambda_value != 0.0) j["lambda"] = v.lambda_value;
  }
  switch (v.flow.kind) {
    case ReducedFlow::Kind::Trivial: j["flow"] = "trivial"; break;
    case ReducedFlow::Kind::TranslationZ: j["flow"] = "translation-Z"; break;
    case ReducedFlow::Kind::FiniteCycle:
      j["flow"] = "finite-cycle";
      j["cycleLength"] = v.flow.cycle_length;
      break;
    case ReducedFlow::Kind::ShiftTwoSided: j["flow"] = "two-sided-shift"; break;
    case ReducedFlow::Kind::SubshiftMeasure: j["flow"] = "subshift"; break;
  }
  if (!v.flow.descriptor.empty()) j["flowDescriptor"] = v.flow.descriptor;
  j["timeDirection"] = v.forward_time ? "forward" : "backward";
  if (v.trace_mass) j["traceMass"] = *v.trace_mass;
  if (v.trace_mass_exact) j["traceMassExact"] = v.trace_mass_exact->str();
  return j;
}

// --- markov ----------------------------------------------------------------

inline MarkovOp markov_from_json(const Json& j) {
  MarkovOp op;
  const Json& rows = jsond::field(j, "rows", "matrix");
  std::size_t n = rows.size();
  if (n == 0) throw JsonError("matrix: empty");
  op.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                    static_cast<Eigen::Index>(n));
  bool any_string = false;
  for (const auto& row : rows)
    for (const auto& e : row)
      if (e.is_string()) any_string = true;
  if (any_string)
    op.exact = detail::RatMat(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw JsonError("matrix: not square");
    for (std::size_t k = 0; k < n; ++k) {
      if (any_string) {
        Rational r = jsond::rational(rows[i][k], "matrix");
        (*op.exact)[i][k] = r;
        op.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            r.to_double();
      } else {
        op.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            rows[i][k].get<double>();
      }
    }
  }
  if (j.contains("states")) {
    op.states = j["states"].get<std::vector<std::string>>();
    if (op.states.size() != n) throw JsonError("matrix: states length mismatch");
  }
  if (j.contains("stationary")) {
    auto v = j["stationary"].get<std::vector<double>>();
    if (v.size() != n) throw JsonError("matrix: stationary length mismatch");
    op.stationary = Eigen::Map<Eigen::VectorXd>(v.data(),
                                                static_cast<Eigen::Index>(n));
  }
  try {
    validate_markov(op);
  } catch (const std::invalid_argument& e) {
    throw JsonError(std::string("matrix: ") + e.what());
  }
  return op;
}

inline Json boundary_to_json(const BoundaryReport& r) {
  Json j;
  j["schema"] = kSchemaBoundary;
  j["tailDim"] = r.tail_dim;
  j["poissonDim"] = r.poisson_dim;
  j["arithmeticMode"] = r.exact_mode ? "exact" : "float";
  j["iterations"] = r.iterations;
  Json sigma = Json::array();
  for (Eigen::Index i = 0; i < r.sigma.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < r.sigma.cols(); ++k) row.push_back(r.sigma(i, k));
    sigma.push_back(std::move(row));
  }
  j["sigma"] = std::move(sigma);
  if (r.sigma_exact) {
    Json se = Json::array();
    for (const auto& row : *r.sigma_exact) {
      Json rj = Json::array();
      for (const auto& e : row) rj.push_back(e.str());
      se.push_back(std::move(rj));
    }
    j["sigmaExact"] = std::move(se);
  }
  if (r.sigma_permutation) j["sigmaPermutation"] = *r.sigma_permutation;
  if (r.stationary_invariant) j["stationaryInvariant"] = *r.stationary_invariant;
  return j;
}

inline Json range_to_json(const BetaRange& r) {
  Json j;
  j["schema"] = kSchemaRange;
  if (r.lower) {
    j["lower"] = *r.lower;
    j["lowerClosed"] = r.lower_closed;
  } else {
    j["lower"] = nullptr;
  }
  j["upper"] = r.upper;
  j["upperClosed"] = r.upper_closed;
  j["excludesZero"] = r.excludes_zero;
  return j;
}

}  // namespace tailflow
