#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailflow/rational.hpp"

namespace tailflow {

/// Row-stochastic operator on a finite state space, acting on functions by
/// P(f)(x) = sum_y P[x,y] f(y). Exact entries are optional and enable the
/// rational code path in the boundary computation.
struct MarkovOp {
  std::vector<std::string> states;
  Eigen::MatrixXd matrix;
  std::optional<std::vector<std::vector<Rational>>> exact;
  std::optional<Eigen::VectorXd> stationary;
};

inline void validate_markov(const MarkovOp& op) {
  Eigen::Index n = op.matrix.rows();
  if (n < 1 || op.matrix.cols() != n)
    throw std::invalid_argument("MarkovOp: matrix must be square and nonempty");
  if (!op.states.empty() && static_cast<Eigen::Index>(op.states.size()) != n)
    throw std::invalid_argument("MarkovOp: state labels do not match matrix");
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (op.matrix(i, j) < 0.0)
        throw std::invalid_argument("MarkovOp: negative entry");
      row += op.matrix(i, j);
    }
    if (std::abs(row - 1.0) > 1e-12)
      throw std::invalid_argument("MarkovOp: row does not sum to 1");
  }
  if (op.exact) {
    if (op.exact->size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("MarkovOp: exact entries shape mismatch");
    for (std::size_t i = 0; i < op.exact->size(); ++i) {
      if ((*op.exact)[i].size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("MarkovOp: exact entries shape mismatch");
      Rational row(0);
      for (const auto& e : (*op.exact)[i]) {
        if (e < Rational(0))
          throw std::invalid_argument("MarkovOp: negative exact entry");
        row += e;
      }
      if (row != Rational(1))
        throw std::invalid_argument("MarkovOp: exact row does not sum to 1");
    }
  }
  if (op.stationary && op.stationary->size() != n)
    throw std::invalid_argument("MarkovOp: stationary vector length mismatch");
}

namespace detail {

using RatMat = std::vector<std::vector<Rational>>;

// Reduced row echelon form in place; returns pivot column indices.
inline std::vector<std::size_t> rref(RatMat& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  std::size_t rows = m.size(), cols = m[0].size(), r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && m[piv][c] == Rational(0)) ++piv;
    if (piv == rows) continue;
    std::swap(m[r], m[piv]);
    Rational inv = Rational(1) / m[r][c];
    for (std::size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == Rational(0)) continue;
      Rational f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

// Basis of the null space of m (columns of the returned matrix-of-columns).
inline RatMat rational_kernel(RatMat m) {
  std::size_t cols = m.empty() ? 0 : m[0].size();
  std::vector<std::size_t> pivots = rref(m);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  RatMat basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[free] = Rational(1);
    for (std::size_t r = 0; r < pivots.size(); ++r)
      v[pivots[r]] = -m[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

// Solves A x = b for square nonsingular rational A.
inline std::vector<Rational> rational_solve(RatMat a,
                                            std::vector<Rational> b) {
  std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) a[i].push_back(b[i]);
  std::vector<std::size_t> pivots = rref(a);
  if (pivots.size() != n)
    throw std::runtime_error("rational_solve: singular system");
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n];
  return x;
}

inline RatMat rat_mul(const RatMat& a, const RatMat& b) {
  std::size_t n = a.size(), k = b.empty() ? 0 : b[0].size();
  RatMat out(n, std::vector<Rational>(k, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t m = 0; m < b.size(); ++m) {
      if (a[i][m] == Rational(0)) continue;
      for (std::size_t j = 0; j < k; ++j) out[i][j] += a[i][m] * b[m][j];
    }
  return out;
}

// Keeps an independent subset of the columns of m (as a column list).
inline RatMat column_basis(const RatMat& m) {
  RatMat copy = m;
  std::vector<std::size_t> pivots = rref(copy);
  std::size_t rows = m.size();
  RatMat out(rows, std::vector<Rational>(pivots.size()));
  for (std::size_t j = 0; j < pivots.size(); ++j)
    for (std::size_t i = 0; i < rows; ++i) out[i][j] = m[i][pivots[j]];
  return out;
}

inline Eigen::MatrixXd orthonormal_column_basis(const Eigen::MatrixXd& m,
                                                double tol) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(tol);
  Eigen::Index r = qr.rank();
  Eigen::MatrixXd q = qr.householderQ();
  return q.leftCols(r);
}

}  // namespace detail

/// Basis of {f : Pf = f}. The constants are always in the span.
inline std::vector<Eigen::VectorXd> harmonic_fixed_space(const MarkovOp& op) {
  validate_markov(op);
  Eigen::Index n = op.matrix.rows();
  if (op.exact) {
    detail::RatMat a = *op.exact;
    for (Eigen::Index i = 0; i < n; ++i)
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] -= Rational(1);
    detail::RatMat ker = detail::rational_kernel(std::move(a));
    std::vector<Eigen::VectorXd> out;
    for (const auto& v : ker) {
      Eigen::VectorXd f(n);
      for (Eigen::Index i = 0; i < n; ++i)
        f(i) = v[static_cast<std::size_t>(i)].to_double();
      out.push_back(std::move(f));
    }
    return out;
  }
  Eigen::MatrixXd a = op.matrix - Eigen::MatrixXd::Identity(n, n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-10);
  Eigen::MatrixXd ker = lu.kernel();
  std::vector<Eigen::VectorXd> out;
  if (lu.dimensionOfKernel() > 0)
    for (Eigen::Index j = 0; j < ker.cols(); ++j) out.push_back(ker.col(j));
  return out;
}

/// Tail boundary of P at finite scale: the eventual image V = cap_n range(P^n),
/// the bijection Sigma = P|_V expressed in the computed basis, and the
/// dimension of the Sigma-fixed subspace (the Poisson boundary dimension).
struct BoundaryReport {
  long long tail_dim = 0;
  long long poisson_dim = 0;
  bool exact_mode = false;
  int iterations = 0;
  Eigen::MatrixXd basis;  // columns span V
  Eigen::MatrixXd sigma;  // P * basis = basis * sigma
  std::optional<detail::RatMat> basis_exact;
  std::optional<detail::RatMat> sigma_exact;
  // Set when Sigma is a permutation of the standard basis (V = whole space).
  std::optional<std::vector<long long>> sigma_permutation;
  // Set when stationary weights were supplied: their restriction to V is
  // Sigma-invariant within tolerance.
  std::optional<bool> stationary_invariant;
};

inline BoundaryReport tail_decomposition(const MarkovOp& op) {
  validate_markov(op);
  Eigen::Index n = op.matrix.rows();
  BoundaryReport rep;

  bool exact = op.exact.has_value() && n <= 256;
  rep.exact_mode = exact;

  if (exact) {
    const detail::RatMat& p = *op.exact;
    detail::RatMat basis(static_cast<std::size_t>(n),
                         std::vector<Rational>(static_cast<std::size_t>(n), Rational(0)));
    for (std::size_t i = 0; i < basis.size(); ++i) basis[i][i] = Rational(1);
    std::size_t rank = basis[0].size();
    bool full_space = true;
    for (int it = 0; it < 2 * n + 2; ++it) {
      detail::RatMat next = detail::column_basis(detail::rat_mul(p, basis));
      ++rep.iterations;
      std::size_t next_rank = next.empty() ? 0 : next[0].size();
      if (next_rank == rank) {
        if (it > 0 || next_rank < static_cast<std::size_t>(n)) {
          basis = std::move(next);
          full_space = next_rank == static_cast<std::size_t>(n);
        }
        break;
      }
      basis = std::move(next);
      rank = next_rank;
      full_space = false;
    }
    if (full_space) {
      // Keep the standard basis so Sigma is literally P.
      basis.assign(static_cast<std::size_t>(n),
                   std::vector<Rational>(static_cast<std::size_t>(n), Rational(0)));
      for (std::size_t i = 0; i < basis.size(); ++i) basis[i][i] = Rational(1);
    }
    rank = basis.empty() ? 0 : basis[0].size();
    rep.tail_dim = static_cast<long long>(rank);

    // Sigma: solve basis * sigma = p * basis column by column, via the
    // invertible square system on pivot rows.
    detail::RatMat pb = detail::rat_mul(p, basis);
    detail::RatMat probe = basis;
    std::vector<std::size_t> pivot_rows;
    {
      // Row-select an invertible square submatrix of basis.
      detail::RatMat bt(rank, std::vector<Rational>(basis.size()));
      for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < rank; ++j) bt[j][i] = basis[i][j];
      pivot_rows = detail::rref(bt);
    }
    detail::RatMat square(rank, std::vector<Rational>(rank));
    for (std::size_t i = 0; i < rank; ++i)
      for (std::size_t j = 0; j < rank; ++j)
        square[i][j] = basis[pivot_rows[i]][j];
    detail::RatMat sigma(rank, std::vector<Rational>(rank, Rational(0)));
    for (std::size_t col = 0; col < rank; ++col) {
      std::vector<Rational> b(rank);
      for (std::size_t i = 0; i < rank; ++i) b[i] = pb[pivot_rows[i]][col];
      std::vector<Rational> x = detail::rational_solve(square, b);
      for (std::size_t i = 0; i < rank; ++i) sigma[i][col] = x[i];
    }

    detail::RatMat fixed = sigma;
    for (std::size_t i = 0; i < rank; ++i) fixed[i][i] -= Rational(1);
    rep.poisson_dim = static_cast<long long>(detail::rational_kernel(std::move(fixed)).size());

    rep.basis = Eigen::MatrixXd(n, static_cast<Eigen::Index>(rank));
    for (Eigen::Index i = 0; i < n; ++i)
      for (std::size_t j = 0; j < rank; ++j)
        rep.basis(i, static_cast<Eigen::Index>(j)) =
            basis[static_cast<std::size_t>(i)][j].to_double();
    rep.sigma = Eigen::MatrixXd(static_cast<Eigen::Index>(rank),
                                static_cast<Eigen::Index>(rank));
    for (std::size_t i = 0; i < rank; ++i)
      for (std::size_t j = 0; j < rank; ++j)
        rep.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            sigma[i][j].to_double();
    rep.basis_exact = std::move(basis);
    rep.sigma_exact = std::move(sigma);
  } else {
    const double tol = 1e-10;
    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
    Eigen::Index rank = n;
    bool full_space = true;
    for (int it = 0; it < 2 * n + 2; ++it) {
      Eigen::MatrixXd next =
          detail::orthonormal_column_basis(op.matrix * basis, tol);
      ++rep.iterations;
      if (next.cols() == rank) {
        if (it > 0 || next.cols() < n) {
          basis = next;
          full_space = next.cols() == n;
        }
        break;
      }
      basis = next;
      rank = next.cols();
      full_space = false;
    }
    if (full_space) basis = Eigen::MatrixXd::Identity(n, n);
    rank = basis.cols();
    rep.tail_dim = rank;
    rep.basis = basis;
    rep.sigma = basis.colPivHouseholderQr().solve(op.matrix * basis);
    // Kernel of sigma - I against an absolute scale: sigma has operator norm
    // about 1, so a relative pivot threshold would miss the all-tiny case.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rep.sigma -
                                          Eigen::MatrixXd::Identity(rank, rank));
    rep.poisson_dim = rank;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-8) --rep.poisson_dim;
  }

  if (rep.tail_dim == n) {
    // Permutation detection for P(f) = f o T instances.
    std::vector<long long> perm(static_cast<std::size_t>(n), -1);
    bool is_perm = true;
    for (Eigen::Index i = 0; i < n && is_perm; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        double v = rep.sigma(i, j);
        if (std::abs(v - 1.0) < 1e-12) {
          if (perm[static_cast<std::size_t>(i)] != -1) { is_perm = false; break; }
          perm[static_cast<std::size_t>(i)] = j;  // T(i) = j
        } else if (std::abs(v) > 1e-12) {
          is_perm = false;
          break;
        }
      }
      if (is_perm && perm[static_cast<std::size_t>(i)] == -1) is_perm = false;
    }
    if (is_perm) rep.sigma_permutation = std::move(perm);
  }

  if (op.stationary) {
    Eigen::RowVectorXd mu = op.stationary->transpose();
    double defect = (mu * op.matrix * rep.basis - mu * rep.basis).lpNorm<Eigen::Infinity>();
    rep.stationary_invariant = defect < 1e-9;
  }
  return rep;
}

/// Structural check of the s = d tail picture on the truncated half line
/// {0, ..., window} with P0(f)(n) = f(n+1): harmonic sequences of the form
/// f_k(n) = g(n-k) for compactly supported g realize the translation of the
/// integers. Verified away from the truncation boundary.
struct BackwardShiftReport {
  long long window = 0;
  int patterns_checked = 0;
  int patterns_matched = 0;
  bool independence_ok = false;
};

inline BackwardShiftReport backward_shift_pattern_check(long long window) {
  if (window < 2)
    throw std::invalid_argument("backward_shift_pattern_check: window must be >= 2");
  BackwardShiftReport rep;
  rep.window = window;
  Eigen::Index n = static_cast<Eigen::Index>(window + 1);
  Eigen::MatrixXd p0 = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) p0(i, i + 1) = 1.0;
  p0(n - 1, n - 1) = 1.0;

  long long kmax = window / 2;
  long long support = window / 4 + 1;
  std::vector<Eigen::VectorXd> patterns;
  for (long long s = 0; s < std::min<long long>(support, 3); ++s) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    g(static_cast<Eigen::Index>(s)) = 1.0;
    patterns.push_back(g);
  }
  patterns.push_back(Eigen::VectorXd::Ones(n));  // constant pattern

  auto family = [&](const Eigen::VectorXd& g, long long k) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    for (Eigen::Index m = 0; m < n; ++m) {
      long long src = static_cast<long long>(m) - k;
      if (src >= 0 && src < n) f(m) = g(static_cast<Eigen::Index>(src));
      else if (src >= n) f(m) = g(n - 1);  // constants extend past the cut
    }
    return f;
  };

  for (const auto& g : patterns) {
    ++rep.patterns_checked;
    bool ok = true;
    for (long long k = 0; k + 1 <= kmax && ok; ++k) {
      Eigen::VectorXd lhs = p0 * family(g, k + 1);
      Eigen::VectorXd rhs = family(g, k);
      // Compare away from the truncation boundary.
      for (Eigen::Index m = 0; m < n - kmax - 1; ++m)
        if (std::abs(lhs(m) - rhs(m)) > 1e-12) { ok = false; break; }
    }
    if (ok) ++rep.patterns_matched;
  }

  // delta and constant patterns stay independent along the sequence.
  Eigen::VectorXd a = family(patterns[0], 10);
  Eigen::VectorXd b = family(patterns.back(), 10);
  Eigen::MatrixXd two(n, 2);
  two.col(0) = a;
  two.col(1) = b;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(two);
  qr.setThreshold(1e-10);
  rep.independence_ok = qr.rank() == 2;
  return rep;
}

/// Iterates P^n(f g) and reports Cauchy defects; a limit is reported when the
/// successive defect drops below 1e-10, oscillation when the orbit revisits an
/// earlier iterate without converging.
struct ConvergenceReport {
  std::vector<double> defects;
  bool converged = false;
  bool oscillating = false;
  int steps = 0;
  Eigen::VectorXd last;
  std::optional<Eigen::VectorXd> limit;
};

inline ConvergenceReport simulate_P_convergence(const MarkovOp& op,
                                                const Eigen::VectorXd& f,
                                                const Eigen::VectorXd& g,
                                                int n_max) {
  validate_markov(op);
  Eigen::Index n = op.matrix.rows();
  if (f.size() != n || g.size() != n)
    throw std::invalid_argument("simulate_P_convergence: vector length mismatch");
  ConvergenceReport rep;
  Eigen::VectorXd cur = f.cwiseProduct(g);
  std::vector<Eigen::VectorXd> history{cur};
  for (int step = 1; step <= n_max; ++step) {
    Eigen::VectorXd next = op.matrix * cur;
    double defect = (next - cur).lpNorm<Eigen::Infinity>();
    rep.defects.push_back(defect);
    rep.steps = step;
    cur = next;
    if (defect < 1e-10) {
      rep.converged = true;
      rep.limit = cur;
      break;
    }
    for (std::size_t h = 0; h + 1 < history.size(); ++h) {
      if ((history[h] - cur).lpNorm<Eigen::Infinity>() < 1e-10) {
        rep.oscillating = true;
        break;
      }
    }
    history.push_back(cur);
    if (rep.oscillating) break;
  }
  rep.last = cur;
  return rep;
}

/// Depth-k cylinder truncation of the one-sided d-ary Bernoulli shift operator
/// P(f)(x_0...x_{k-1}) = sum_a w_a f(x_1...x_{k-1} a). States are the d^k
/// words in lexicographic order.
inline MarkovOp bernoulli_shift_operator(int d, int depth,
                                         const std::vector<Rational>& weights) {
  if (d < 2 || static_cast<int>(weights.size()) != d)
    throw std::invalid_argument("bernoulli_shift_operator: bad weights");
  if (depth < 1 || depth > 10)
    throw std::invalid_argument("bernoulli_shift_operator: depth out of range");
  std::size_t n = 1;
  for (int i = 0; i < depth; ++i) n *= static_cast<std::size_t>(d);
  MarkovOp op;
  op.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                    static_cast<Eigen::Index>(n));
  bool small = n <= 256;
  if (small)
    op.exact = detail::RatMat(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t tail = (x * static_cast<std::size_t>(d)) % n;
    for (int a = 0; a < d; ++a) {
      std::size_t y = tail + static_cast<std::size_t>(a);
      op.matrix(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) +=
          weights[static_cast<std::size_t>(a)].to_double();
      if (small) (*op.exact)[x][y] += weights[static_cast<std::size_t>(a)];
    }
  }
  return op;
}

/// P(f) = f o T for a permutation T given as image list.
inline MarkovOp permutation_operator(const std::vector<long long>& t) {
  std::size_t n = t.size();
  MarkovOp op;
  op.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                    static_cast<Eigen::Index>(n));
  op.exact = detail::RatMat(n, std::vector<Rational>(n, Rational(0)));
  std::vector<bool> seen(n, false);
  for (std::size_t x = 0; x < n; ++x) {
    if (t[x] < 0 || t[x] >= static_cast<long long>(n) ||
        seen[static_cast<std::size_t>(t[x])])
      throw std::invalid_argument("permutation_operator: not a permutation");
    seen[static_cast<std::size_t>(t[x])] = true;
    op.matrix(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(t[x])) = 1.0;
    (*op.exact)[x][static_cast<std::size_t>(t[x])] = Rational(1);
  }
  return op;
}

}  // namespace tailflow
