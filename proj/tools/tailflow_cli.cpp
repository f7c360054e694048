#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tailflow.hpp"

namespace tf = tailflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitResidual = 1;
constexpr int kExitInput = 2;

tf::Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tf::JsonError("cannot open " + path);
  tf::Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw tf::JsonError(path + ": " + e.what());
  }
  return j;
}

void emit(const tf::Json& j, const std::string& out_path) {
  std::string text = j.dump(2);
  text.push_back('\n');
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw tf::JsonError("cannot write " + out_path);
    out << text;
  }
}

tf::KmsParams params_from_args(long long d, long long s, const std::string& beta) {
  return tf::derive(d, s, tf::beta_from_string(beta));
}

int cmd_range(long long d, long long s, const std::string& out) {
  tf::Json j = tf::range_to_json(tf::admissible_beta(d, s));
  j["d"] = d;
  j["s"] = s;
  emit(j, out);
  return kExitOk;
}

int cmd_verify(const std::string& measure_file, const std::string& params_file,
               int depth, double tol, const std::string& out) {
  tf::MeasureRep mu = tf::measure_from_json(load_json(measure_file));
  tf::KmsParams p = tf::params_from_json(load_json(params_file));
  tf::Json j;
  j["schema"] = "tailflow.verify.v1";
  j["depth"] = depth;
  j["tolerance"] = tol;

  double worst = 0.0;
  tf::PfReport pf = tf::pf1_pf2_check(p, mu, depth);
  j["pf1Residual"] = pf.pf1_residual;
  j["pf4Residual"] = pf.pf2_residual;
  worst = std::max(worst, pf.pf1_residual);
  worst = std::max(worst, pf.pf2_residual);

  bool qi_applicable = p.lambda_defined && p.q_defined;
  if (const auto* b = std::get_if<tf::BernoulliMeasure>(&mu))
    qi_applicable = qi_applicable && b->two_sided;
  if (const auto* t = std::get_if<tf::CylinderTableMeasure>(&mu))
    qi_applicable = qi_applicable && t->start <= -1;
  if (qi_applicable) {
    tf::QiResidual qi = tf::quasi_invariance_residual(mu, p, depth);
    j["qiResidual"] = qi.value;
    j["qiExactZero"] = qi.exact_zero;
    j["arithmeticMode"] = qi.exact_zero ? "exact" : "float";
    worst = std::max(worst, qi.value);
  } else {
    j["qiResidual"] = nullptr;
    j["arithmeticMode"] = "float";
  }
  j["pass"] = worst <= tol;
  emit(j, out);
  return worst <= tol ? kExitOk : kExitResidual;
}

int cmd_construct_periodic(const std::string& word, long long d, long long s,
                           const std::string& out) {
  tf::Word w = tf::parse_word(word);
  if (w.empty()) throw tf::JsonError("construct: empty word");
  tf::BiSeq y = tf::BiSeq::periodic(w);
  // Derive the forced temperature first, then build nu_y at it.
  long long n = static_cast<long long>(w.size());
  tf::Rational q(tf::digit_sum(w), n);
  tf::KmsParams p = tf::derive(d, s, tf::BetaSpec::affine(tf::Rational(1) - q));
  tf::NuPeriodic nu = tf::nu_periodic(y, p, n);
  tf::Json j = tf::measure_to_json(nu.measure);
  j["family"] = "nu_y";
  j["period"] = nu.period;
  j["q"] = nu.q.str();
  j["forcedBeta"] = tf::beta_to_json(nu.forced_beta);
  j["forcedBetaValue"] = nu.forced_beta.eval(p.s, p.t);
  j["params"] = tf::params_to_json(p);
  j["arithmeticMode"] = "exact";
  j["tolerance"] = 0.0;
  emit(j, out);
  return kExitOk;
}

int cmd_construct_bernoulli(long long d, long long s, const std::string& beta,
                            bool two_sided, const std::string& out) {
  tf::KmsParams p = params_from_args(d, s, beta);
  tf::BernoulliMeasure b = tf::bernoulli_for(p);
  b.two_sided = two_sided;
  tf::Json j = tf::measure_to_json(tf::MeasureRep(b));
  j["family"] = "b_p";
  j["params"] = tf::params_to_json(p);
  j["arithmeticMode"] = p.p_exact ? "exact" : "float";
  j["tolerance"] = 1e-12;
  emit(j, out);
  return kExitOk;
}

int cmd_construct_mpy(long long d, long long s, const std::string& beta,
                      const std::string& yword, int count,
                      const std::string& out) {
  tf::KmsParams p = params_from_args(d, s, beta);
  if (!p.p_exact)
    throw tf::JsonError("construct mpy: needs an exact beta (log(a/b))");
  tf::BiSeq y = tf::BiSeq::periodic(tf::parse_word(yword));
  tf::AtomicMeasure m = tf::m_p_y(*p.p_exact, y, count);
  tf::Json j = tf::measure_to_json(tf::MeasureRep(m));
  j["family"] = "m_p_y";
  j["params"] = tf::params_to_json(p);
  j["arithmeticMode"] = "exact";
  j["tolerance"] = m.truncated_mass;
  emit(j, out);
  return kExitOk;
}

int cmd_construct_toeplitz(const std::vector<long long>& k, int n, long long d,
                           long long s, const std::string& out) {
  if (static_cast<int>(k.size()) < n)
    throw tf::JsonError("construct toeplitz: k shorter than n");
  tf::BiSeq z = tf::BiSeq::toeplitz(k);
  tf::ToeplitzWords tw = tf::toeplitz_words(k, n);
  // q = 1/2 for these balanced generators; beta = (log s + log t)/2.
  tf::KmsParams p = tf::derive(d, s, tf::BetaSpec::affine(tf::Rational(1, 2)));
  tf::NuTruncated nu = tf::nu_aperiodic_truncated(z, p, tw.l);
  tf::Json j = tf::measure_to_json(tf::MeasureRep(nu.measure));
  j["family"] = "nu_beta_z_n";
  j["n"] = tw.l;
  j["tvDefect"] = nu.tv_defect;
  j["tvDefectDirect"] = nu.tv_defect_direct;
  j["params"] = tf::params_to_json(p);
  j["arithmeticMode"] = "exact";
  j["tolerance"] = nu.tv_defect;
  emit(j, out);
  return kExitOk;
}

int cmd_classify(const std::string& datum_file, const std::string& out) {
  tf::KmsDatum d = tf::datum_from_json(load_json(datum_file));
  tf::FactorVerdict v = tf::classify(d);
  emit(tf::verdict_to_json(v), out);
  return kExitOk;
}

int cmd_tail(const std::string& matrix_file, const std::string& out) {
  tf::MarkovOp op = tf::markov_from_json(load_json(matrix_file));
  tf::BoundaryReport r = tf::tail_decomposition(op);
  emit(tf::boundary_to_json(r), out);
  return kExitOk;
}

int cmd_cocycle(const std::string& seq_file, const std::string& q_str,
                long long n, long long scan, int transfer_depth,
                std::uint64_t seed, const std::string& out) {
  tf::BiSeq z = tf::seq_from_json(load_json(seq_file));
  auto q = tf::Rational::parse(q_str);
  if (!q) throw tf::JsonError("cocycle: q must be rational a/b");
  tf::Json j;
  j["schema"] = "tailflow.cocycle.v1";
  j["q"] = q->str();
  j["arithmeticMode"] = "exact";
  if (n != 0 || (scan == 0 && transfer_depth == 0)) {
    tf::CocycleValue c = tf::cocycle(z, n, *q);
    j["n"] = n;
    j["value"] = c.exact_value.str();
    j["valueFloat"] = c.value;
  }
  if (scan > 0) {
    tf::BoundScan bs = tf::bound_scan(z, *q, scan);
    j["scanWindow"] = bs.window;
    j["min"] = bs.min.str();
    j["max"] = bs.max.str();
  }
  if (transfer_depth > 0) {
    tf::TransferOptions opt;
    opt.seed = seed;
    tf::TransferFunction h = tf::solve_transfer({z}, *q, transfer_depth, opt);
    j["transferDepth"] = h.depth;
    j["transferExact"] = h.exact;
    j["transferResidual"] = h.residual;
    j["transferClasses"] = h.table.size();
    j["seed"] = seed;
  }
  emit(j, out);
  return kExitOk;
}

int cmd_toeplitz(const std::vector<long long>& k, int n, const std::string& out) {
  tf::ToeplitzWords tw = tf::toeplitz_words(k, n);
  tf::BiSeq z = tf::BiSeq::toeplitz(k);
  long long half_prod = 1;
  for (int i = 0; i < n; ++i) half_prod *= k[static_cast<std::size_t>(i)] - 2;
  tf::Rational q(1, 2);
  tf::Json j;
  j["schema"] = "tailflow.toeplitz.v1";
  j["k"] = std::vector<long long>(k.begin(), k.begin() + n);
  j["l"] = tw.l;
  j["digitSumA"] = tf::digit_sum(tw.a);
  j["digitSumB"] = tf::digit_sum(tw.b);
  // Identities: digit sums l/2 +- (1/2) prod(k(j)-2); c_{l}(z) = half the
  // product; c_{2l}(z) = 0.
  j["halfProduct"] = half_prod;
  j["cAtL"] = tf::cocycle(z, tw.l, q).exact_value.str();
  j["cAt2L"] = tf::cocycle(z, 2 * tw.l, q).exact_value.str();
  bool ok = 2 * tf::digit_sum(tw.a) == tw.l + half_prod &&
            2 * tf::digit_sum(tw.b) == tw.l - half_prod &&
            tf::cocycle(z, tw.l, q).exact_value == tf::Rational(half_prod, 2) &&
            tf::cocycle(z, 2 * tw.l, q).exact_value == tf::Rational(0);
  j["identitiesHold"] = ok;
  j["arithmeticMode"] = "exact";
  emit(j, out);
  return ok ? kExitOk : kExitResidual;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tailflow: KMS measure families, cocycles, and tail boundaries"};
  app.require_subcommand(1);

  std::string out;
  app.add_option("--out", out, "write JSON here instead of stdout");

  long long d = 2, s = 2, n = 0, scan = 0;
  int depth = 8, count = 32, level = 2, transfer_depth = 0;
  double tol = 1e-12;
  std::uint64_t seed = 1;
  bool two_sided = false;
  std::string measure_file, params_file, datum_file, matrix_file, seq_file;
  std::string beta, word, yword, q_str;
  std::vector<long long> kvec;

  auto* c_range = app.add_subcommand("range", "admissible beta interval");
  c_range->add_option("--d", d)->required();
  c_range->add_option("--s", s)->required();

  auto* c_verify = app.add_subcommand("verify", "PF / quasi-invariance residuals");
  c_verify->add_option("--measure", measure_file)->required();
  c_verify->add_option("--params", params_file)->required();
  c_verify->add_option("--depth", depth);
  c_verify->add_option("--tol", tol);

  auto* c_construct = app.add_subcommand("construct", "build a measure");
  c_construct->require_subcommand(1);
  auto* cc_per = c_construct->add_subcommand("periodic", "orbit measure nu_y");
  cc_per->add_option("--word", word)->required();
  cc_per->add_option("--d", d)->required();
  cc_per->add_option("--s", s)->required();
  auto* cc_ber = c_construct->add_subcommand("bernoulli", "product measure b_p");
  cc_ber->add_option("--d", d)->required();
  cc_ber->add_option("--s", s)->required();
  cc_ber->add_option("--beta", beta)->required();
  cc_ber->add_flag("--two-sided", two_sided);
  auto* cc_mpy = c_construct->add_subcommand("mpy", "atomic series m_{p,y}");
  cc_mpy->add_option("--d", d)->required();
  cc_mpy->add_option("--s", s)->required();
  cc_mpy->add_option("--beta", beta)->required();
  cc_mpy->add_option("--y", yword)->required();
  cc_mpy->add_option("--count", count);
  auto* cc_toe = c_construct->add_subcommand("toeplitz", "truncated nu_{beta,z,n}");
  cc_toe->add_option("--k", kvec)->required()->delimiter(',');
  cc_toe->add_option("--n", level);
  cc_toe->add_option("--d", d);
  cc_toe->add_option("--s", s);

  auto* c_classify = app.add_subcommand("classify", "factor type verdict");
  c_classify->add_option("--datum", datum_file)->required();

  auto* c_tail = app.add_subcommand("tail", "tail boundary of a Markov operator");
  c_tail->add_option("--matrix", matrix_file)->required();

  auto* c_cocycle = app.add_subcommand("cocycle", "cocycle values and transfer");
  c_cocycle->add_option("--seq", seq_file)->required();
  c_cocycle->add_option("--q", q_str)->required();
  c_cocycle->add_option("--n", n);
  c_cocycle->add_option("--scan", scan);
  c_cocycle->add_option("--transfer", transfer_depth);
  c_cocycle->add_option("--seed", seed);

  auto* c_toeplitz = app.add_subcommand("toeplitz", "generator word identities");
  c_toeplitz->add_option("--k", kvec)->required()->delimiter(',');
  c_toeplitz->add_option("--n", level);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  // Defaults for the toeplitz construction branch: s = d - t with t = d - s;
  // the balanced q = 1/2 needs 1 <= t < s, default (3, 2).
  try {
    if (c_range->parsed()) return cmd_range(d, s, out);
    if (c_verify->parsed())
      return cmd_verify(measure_file, params_file, depth, tol, out);
    if (c_construct->parsed()) {
      if (cc_per->parsed()) return cmd_construct_periodic(word, d, s, out);
      if (cc_ber->parsed())
        return cmd_construct_bernoulli(d, s, beta, two_sided, out);
      if (cc_mpy->parsed())
        return cmd_construct_mpy(d, s, beta, yword, count, out);
      if (cc_toe->parsed()) {
        if (!cc_toe->count("--d")) { d = 3; s = 2; }
        return cmd_construct_toeplitz(kvec, level, d, s, out);
      }
    }
    if (c_classify->parsed()) return cmd_classify(datum_file, out);
    if (c_tail->parsed()) return cmd_tail(matrix_file, out);
    if (c_cocycle->parsed())
      return cmd_cocycle(seq_file, q_str, n, scan, transfer_depth, seed, out);
    if (c_toeplitz->parsed()) return cmd_toeplitz(kvec, level, out);
  } catch (const tf::JsonError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
