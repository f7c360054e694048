#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "tailflow/rational.hpp"
#include "tailflow/sequence.hpp"

namespace tailflow {

/// Value of the additive shift cocycle c_n at a point, together with the
/// window of coordinates that was read. Exact when q is rational.
struct CocycleValue {
  long long n = 0;
  bool exact = true;
  Rational exact_value{0};
  double value = 0.0;
  long long window_lo = 0;
  long long window_hi = 0;
};

/// c_n(z) = sum_{j=0}^{n-1} z_j - q n for n >= 1, 0 for n = 0, and
/// -sum_{j=1}^{-n} z_{-j} - q n for n <= -1.
inline CocycleValue cocycle(const BiSeq& z, long long n, const Rational& q) {
  CocycleValue c;
  c.n = n;
  c.window_lo = std::min<long long>(0, n);
  c.window_hi = std::max<long long>(0, n);
  long long s = 0;
  if (n != 0) {
    Word w = z.window(c.window_lo, c.window_hi);
    for (auto b : w) s += b;
  }
  if (n >= 0)
    c.exact_value = Rational(s) - q * Rational(n);
  else
    c.exact_value = Rational(-s) - q * Rational(n);
  c.value = c.exact_value.to_double();
  return c;
}

inline CocycleValue cocycle(const BiSeq& z, long long n, double q) {
  CocycleValue c;
  c.n = n;
  c.exact = false;
  c.window_lo = std::min<long long>(0, n);
  c.window_hi = std::max<long long>(0, n);
  long long s = 0;
  if (n != 0) {
    Word w = z.window(c.window_lo, c.window_hi);
    for (auto b : w) s += b;
  }
  c.value = (n >= 0 ? static_cast<double>(s) : -static_cast<double>(s)) -
            q * static_cast<double>(n);
  return c;
}

struct IdentityCheck {
  long long m = 0;
  long long n = 0;
  bool exact_equal = false;
  double residual = 0.0;
};

/// Checks c_{m+n}(z) = c_m(z) + c_n(sigma^m z) for each pair.
inline std::vector<IdentityCheck> check_cocycle_identity(
    const BiSeq& z, const std::vector<std::pair<long long, long long>>& pairs,
    const Rational& q) {
  std::vector<IdentityCheck> out;
  out.reserve(pairs.size());
  for (auto [m, n] : pairs) {
    Rational lhs = cocycle(z, m + n, q).exact_value;
    Rational rhs =
        cocycle(z, m, q).exact_value + cocycle(z.shifted(m), n, q).exact_value;
    IdentityCheck ck;
    ck.m = m;
    ck.n = n;
    ck.exact_equal = (lhs == rhs);
    ck.residual = std::abs((lhs - rhs).to_double());
    out.push_back(ck);
  }
  return out;
}

struct BoundScan {
  Rational min{0};
  Rational max{0};
  long long window = 0;
};

/// Exact min/max of c_k(z) over |k| <= window, via one pass of prefix sums.
inline BoundScan bound_scan(const BiSeq& z, const Rational& q,
                            long long window) {
  if (window < 1) throw std::invalid_argument("bound_scan: window must be >= 1");
  BoundScan r;
  r.window = window;
  Word w = z.window(-window, window);
  // c_0 = 0 is always included.
  Rational cur(0);
  r.min = Rational(0);
  r.max = Rational(0);
  // Forward: c_{k+1} = c_k + z_k - q.
  for (long long k = 0; k < window; ++k) {
    cur += Rational(w[static_cast<std::size_t>(window + k)]) - q;
    r.min = std::min(r.min, cur);
    r.max = std::max(r.max, cur);
  }
  // Backward: c_{-(k+1)} = c_{-k} - z_{-k-1} + q.
  cur = Rational(0);
  for (long long k = 0; k < window; ++k) {
    cur += q - Rational(w[static_cast<std::size_t>(window - 1 - k)]);
    r.min = std::min(r.min, cur);
    r.max = std::max(r.max, cur);
  }
  return r;
}

/// Candidate transfer function h on depth-limited central word classes, with
/// c_n(z) = h(sigma^n z) - h(z) holding up to the reported residual. The
/// residual is measured, never assumed zero.
struct TransferFunction {
  int depth = 0;
  std::map<Word, double> table;
  std::map<Word, Rational> exact_table;
  bool exact = false;
  double residual = 0.0;
  Word base_word;
  Rational q{0};
};

struct TransferOptions {
  long long orbit_window = 512;   // shifts used to harvest word classes
  Rational bound{4};              // reject if |c_k| exceeds this on the scan
  long long scan_window = 2048;
  int check_n = 64;               // residual check horizon
  int check_points = 100;         // sampled base points for the residual
  std::uint64_t seed = 1;
};

namespace detail {

inline Word central_word(const BiSeq& z, long long at, int depth) {
  return z.window(at - depth, at + depth);
}

}  // namespace detail

/// Solves h(sigma z) - h(z) = c_1(z) over central-word classes of the given
/// depth, pinned to 0 on the first class seen. The class graph is solved
/// exactly when consistent (breadth-first propagation over rationals);
/// otherwise in the least-squares sense with the inconsistency left in the
/// residual.
inline TransferFunction solve_transfer(const std::vector<BiSeq>& samples,
                                       const Rational& q, int depth,
                                       const TransferOptions& opt = {}) {
  if (samples.empty())
    throw std::invalid_argument("solve_transfer: no samples");
  if (depth < 1) throw std::invalid_argument("solve_transfer: depth must be >= 1");
  for (const auto& z : samples) {
    BoundScan bs = bound_scan(z, q, opt.scan_window);
    if (bs.max > opt.bound || bs.min < -opt.bound)
      throw std::domain_error(
          "solve_transfer: cocycle exceeds the configured bound; no bounded "
          "transfer function can exist");
  }

  struct Edge {
    std::size_t from, to;
    Rational rhs;  // h[to] - h[from] = rhs
  };
  std::map<Word, std::size_t> index;
  std::vector<Word> words;
  std::vector<Edge> edges;
  auto node = [&](Word w) {
    auto it = index.find(w);
    if (it != index.end()) return it->second;
    std::size_t id = words.size();
    index.emplace(w, id);
    words.push_back(std::move(w));
    return id;
  };
  for (const auto& z : samples) {
    Word span = z.window(-opt.orbit_window - depth, opt.orbit_window + depth + 1);
    auto sym = [&](long long j) {
      return span[static_cast<std::size_t>(j + opt.orbit_window + depth)];
    };
    for (long long k = -opt.orbit_window; k < opt.orbit_window; ++k) {
      Word a(span.begin() + (k - depth + opt.orbit_window + depth),
             span.begin() + (k + depth + opt.orbit_window + depth));
      Word b(span.begin() + (k + 1 - depth + opt.orbit_window + depth),
             span.begin() + (k + 1 + depth + opt.orbit_window + depth));
      std::size_t ia = node(std::move(a));
      std::size_t ib = node(std::move(b));
      edges.push_back(Edge{ia, ib, Rational(sym(k)) - q});
    }
  }

  TransferFunction h;
  h.depth = depth;
  h.q = q;
  h.base_word = words.front();

  // Breadth-first propagation; conflicts mean the depth truncation cannot
  // carry an exact coboundary and we fall back to least squares.
  std::vector<std::vector<std::pair<std::size_t, Rational>>> adj(words.size());
  for (const auto& e : edges) {
    adj[e.from].push_back({e.to, e.rhs});
    adj[e.to].push_back({e.from, -e.rhs});
  }
  std::vector<std::optional<Rational>> val(words.size());
  bool consistent = true;
  for (std::size_t root = 0; root < words.size() && consistent; ++root) {
    if (val[root]) continue;
    val[root] = Rational(0);
    std::vector<std::size_t> queue{root};
    while (!queue.empty() && consistent) {
      std::size_t u = queue.back();
      queue.pop_back();
      for (const auto& [v, rhs] : adj[u]) {
        Rational want = *val[u] + rhs;
        if (!val[v]) {
          val[v] = want;
          queue.push_back(v);
        } else if (*val[v] != want) {
          consistent = false;
          break;
        }
      }
    }
  }

  if (consistent) {
    h.exact = true;
    for (std::size_t i = 0; i < words.size(); ++i) {
      h.exact_table.emplace(words[i], *val[i]);
      h.table.emplace(words[i], val[i]->to_double());
    }
  } else {
    // Least squares on the difference graph (Laplacian system), basepoint
    // pinned by a soft anchor on the first class.
    std::size_t n = words.size();
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    std::vector<double> rhs(n, 0.0);
    for (const auto& e : edges) {
      A[e.from][e.from] += 1.0;
      A[e.to][e.to] += 1.0;
      A[e.from][e.to] -= 1.0;
      A[e.to][e.from] -= 1.0;
      double r = e.rhs.to_double();
      rhs[e.to] += r;
      rhs[e.from] -= r;
    }
    A[0][0] += 1.0;  // pin h(base) = 0
    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      for (std::size_t r2 = col + 1; r2 < n; ++r2)
        if (std::abs(A[r2][col]) > std::abs(A[piv][col])) piv = r2;
      std::swap(A[col], A[piv]);
      std::swap(rhs[col], rhs[piv]);
      if (std::abs(A[col][col]) < 1e-14) continue;
      for (std::size_t r2 = 0; r2 < n; ++r2) {
        if (r2 == col) continue;
        double f = A[r2][col] / A[col][col];
        if (f == 0.0) continue;
        for (std::size_t c2 = col; c2 < n; ++c2) A[r2][c2] -= f * A[col][c2];
        rhs[r2] -= f * rhs[col];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double v = std::abs(A[i][i]) < 1e-14 ? 0.0 : rhs[i] / A[i][i];
      h.table.emplace(words[i], v);
    }
  }

  // Residual: max over sampled (point, n) of |c_n - (h(sigma^n z) - h(z))|.
  std::mt19937_64 rng(opt.seed);
  double res = 0.0;
  for (const auto& z : samples) {
    std::uniform_int_distribution<long long> pos(-opt.orbit_window / 2,
                                                 opt.orbit_window / 2 - opt.check_n - 1);
    std::uniform_int_distribution<int> len(1, opt.check_n);
    for (int i = 0; i < opt.check_points; ++i) {
      long long j = pos(rng);
      long long n = len(rng);
      Word wa = detail::central_word(z, j, depth);
      Word wb = detail::central_word(z, j + n, depth);
      Rational cn = cocycle(z.shifted(j), n, q).exact_value;
      if (h.exact) {
        Rational diff = h.exact_table.at(wb) - h.exact_table.at(wa);
        res = std::max(res, std::abs((cn - diff).to_double()));
      } else {
        double diff = h.table.at(wb) - h.table.at(wa);
        res = std::max(res, std::abs(cn.to_double() - diff));
      }
    }
  }
  h.residual = res;
  return h;
}

}  // namespace tailflow
