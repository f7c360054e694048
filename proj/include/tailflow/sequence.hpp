#pragma once

#include <array>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>

#include "tailflow/word.hpp"

namespace tailflow {

/// Bi-infinite binary sequences, represented symbolically. A sequence is one
/// of four closed forms; every operation inspects only a finite declared
/// window. Values are immutable after construction and safe to share.
class BiSeq {
public:
  /// ... L L L [core] R R R ...  The core starts at index `origin`; the left
  /// period repeats backwards from origin, the right period repeats forwards
  /// from origin + |core|.
  struct EventuallyPeriodic {
    Word left;
    Word core;
    Word right;
    long long origin = 0;
  };

  /// Two-sided fixed point of a binary substitution: the left half is the
  /// limit of rule^n(seed_left) read backwards from index -1, the right half
  /// is rule^n(seed_right) from index 0. Requires rule(seed_left) to end with
  /// seed_left and rule(seed_right) to start with seed_right.
  struct Substitution {
    std::array<Word, 2> rule;
    std::uint8_t seed_left = 0;
    std::uint8_t seed_right = 0;
  };

  /// z_j = 0 for j < 0 and z_j = a(n)_j for j >= 0, where a(n) are the nested
  /// Toeplitz words of the parameter sequence k. When a coordinate beyond the
  /// provided k entries is requested, k is extended by repeating its last
  /// entry; the nesting property keeps earlier coordinates unchanged.
  struct Toeplitz {
    std::vector<long long> k;
  };

  /// prefix placed on [0, |prefix|), base shifted right behind it, zeros on
  /// the negative axis. Used for points like 0^n y on the one-sided space.
  struct ZeroPrefixed {
    Word prefix;
    std::shared_ptr<const BiSeq> base;
  };

  using Rep = std::variant<EventuallyPeriodic, Substitution, Toeplitz, ZeroPrefixed>;

  static BiSeq eventually_periodic(Word left, Word core, Word right,
                                   long long origin = 0) {
    if (left.empty() || right.empty())
      throw std::invalid_argument("BiSeq: periodic parts must be nonempty");
    return BiSeq(Rep(EventuallyPeriodic{std::move(left), std::move(core),
                                        std::move(right), origin}));
  }

  /// Periodic in both directions with the same word.
  static BiSeq periodic(const Word& w, long long origin = 0) {
    if (w.empty()) throw std::invalid_argument("BiSeq: empty period");
    return eventually_periodic(w, {}, w, origin);
  }

  static BiSeq constant(std::uint8_t symbol) {
    return periodic(Word{symbol});
  }

  /// Builds the two-sided fixed point, squaring the rule once if the seed
  /// conditions only hold for the squared substitution.
  static BiSeq substitution(std::array<Word, 2> rule, std::uint8_t seed_left,
                            std::uint8_t seed_right) {
    if (rule[0].empty() || rule[1].empty())
      throw std::invalid_argument("BiSeq: substitution images must be nonempty");
    if (seed_left > 1 || seed_right > 1)
      throw std::invalid_argument("BiSeq: seeds must be binary symbols");
    auto fits = [&](const std::array<Word, 2>& r) {
      return r[seed_left].back() == seed_left &&
             r[seed_right].front() == seed_right &&
             r[0].size() + r[1].size() > 2;
    };
    if (!fits(rule)) {
      std::array<Word, 2> sq;
      for (int i = 0; i < 2; ++i)
        for (auto s : rule[i]) {
          sq[i].insert(sq[i].end(), rule[s].begin(), rule[s].end());
        }
      if (!fits(sq))
        throw std::invalid_argument(
            "BiSeq: seed pair is not a two-sided fixed point of the rule or "
            "its square");
      rule = std::move(sq);
    }
    return BiSeq(Rep(Substitution{std::move(rule), seed_left, seed_right}));
  }

  static BiSeq thue_morse() {
    return substitution({parse_word("01"), parse_word("10")}, 0, 0);
  }

  static BiSeq toeplitz(std::vector<long long> k) {
    if (k.empty()) throw std::invalid_argument("BiSeq: empty Toeplitz k");
    for (auto v : k)
      if (v < 3) throw std::invalid_argument("BiSeq: Toeplitz k entries must be >= 3");
    return BiSeq(Rep(Toeplitz{std::move(k)}));
  }

  static BiSeq zero_prefixed(Word prefix, const BiSeq& base) {
    return BiSeq(Rep(ZeroPrefixed{std::move(prefix),
                                  std::make_shared<const BiSeq>(base)}));
  }

  /// z_j for any integer j.
  int coord(long long j) const { return raw_coord(j + offset_); }

  /// Symbols z_lo .. z_{hi-1}.
  Word window(long long lo, long long hi) const {
    Word w;
    if (hi <= lo) return w;
    w.reserve(static_cast<std::size_t>(hi - lo));
    raw_window(lo + offset_, hi + offset_, w);
    return w;
  }

  /// coord(shifted(n), j) == coord(z, j + n).
  BiSeq shifted(long long n) const {
    BiSeq z = *this;
    z.offset_ += n;
    return z;
  }

  long long offset() const { return offset_; }
  const Rep& rep() const { return *rep_; }

private:
  explicit BiSeq(Rep rep) : rep_(std::make_shared<const Rep>(std::move(rep))) {}

  int raw_coord(long long j) const {
    Word w;
    raw_window(j, j + 1, w);
    return w[0];
  }

  void raw_window(long long lo, long long hi, Word& out) const;

  std::shared_ptr<const Rep> rep_;
  long long offset_ = 0;
};

namespace detail {

inline Word apply_rule(const std::array<Word, 2>& rule, const Word& w) {
  Word out;
  out.reserve(w.size() * 2);
  for (auto s : w) out.insert(out.end(), rule[s].begin(), rule[s].end());
  return out;
}

// Expands rule^n(seed) until the word has at least `need` symbols.
inline Word expand_to(const std::array<Word, 2>& rule, std::uint8_t seed,
                      std::size_t need) {
  Word w{seed};
  while (w.size() < need) {
    std::size_t before = w.size();
    w = apply_rule(rule, w);
    if (w.size() <= before)
      throw std::logic_error("BiSeq: substitution does not grow");
  }
  return w;
}

}  // namespace detail

/// Result of toeplitz_words: the nested words a(n), b(n) of common length
/// l(n) = k(1)...k(n).
struct ToeplitzWords {
  Word a;
  Word b;
  long long l = 1;
};

/// a(0)=1, b(0)=0, a(n)=a(n-1) b(n-1) a(n-1)^{k(n)-2},
/// b(n)=a(n-1) b(n-1)^{k(n)-1}.
inline ToeplitzWords toeplitz_words(const std::vector<long long>& k, int n) {
  if (n < 0) throw std::invalid_argument("toeplitz_words: n must be >= 0");
  if (static_cast<int>(k.size()) < n)
    throw std::invalid_argument("toeplitz_words: k has fewer than n entries");
  for (int i = 0; i < n; ++i)
    if (k[i] < 3)
      throw std::invalid_argument("toeplitz_words: k entries must be >= 3");
  ToeplitzWords t;
  t.a = Word{1};
  t.b = Word{0};
  t.l = 1;
  for (int i = 1; i <= n; ++i) {
    Word a = concat(concat(t.a, t.b), repeat(t.a, k[i - 1] - 2));
    Word b = concat(t.a, repeat(t.b, k[i - 1] - 1));
    t.a = std::move(a);
    t.b = std::move(b);
    t.l *= k[i - 1];
  }
  return t;
}

inline void BiSeq::raw_window(long long lo, long long hi, Word& out) const {
  struct Visitor {
    long long lo, hi;
    Word& out;

    void operator()(const EventuallyPeriodic& r) const {
      long long core_end = r.origin + static_cast<long long>(r.core.size());
      for (long long j = lo; j < hi; ++j) {
        if (j < r.origin) {
          long long m = static_cast<long long>(r.left.size());
          long long i = ((j - r.origin) % m + m) % m;
          out.push_back(r.left[static_cast<std::size_t>(i)]);
        } else if (j < core_end) {
          out.push_back(r.core[static_cast<std::size_t>(j - r.origin)]);
        } else {
          long long m = static_cast<long long>(r.right.size());
          long long i = (j - core_end) % m;
          out.push_back(r.right[static_cast<std::size_t>(i)]);
        }
      }
    }

    void operator()(const Substitution& r) const {
      Word rightw, leftw;
      if (hi > 0)
        rightw = detail::expand_to(r.rule, r.seed_right,
                                   static_cast<std::size_t>(hi));
      if (lo < 0)
        leftw = detail::expand_to(r.rule, r.seed_left,
                                  static_cast<std::size_t>(-lo));
      for (long long j = lo; j < hi; ++j) {
        if (j >= 0)
          out.push_back(rightw[static_cast<std::size_t>(j)]);
        else
          out.push_back(leftw[leftw.size() - static_cast<std::size_t>(-j)]);
      }
    }

    void operator()(const Toeplitz& r) const {
      Word a{1}, b{0};
      long long l = 1;
      std::size_t idx = 0;
      while (l <= hi) {
        long long kk = idx < r.k.size() ? r.k[idx] : r.k.back();
        Word na = concat(concat(a, b), repeat(a, kk - 2));
        Word nb = concat(a, repeat(b, kk - 1));
        a = std::move(na);
        b = std::move(nb);
        l *= kk;
        ++idx;
      }
      for (long long j = lo; j < hi; ++j)
        out.push_back(j < 0 ? 0 : a[static_cast<std::size_t>(j)]);
    }

    void operator()(const ZeroPrefixed& r) const {
      long long plen = static_cast<long long>(r.prefix.size());
      for (long long j = lo; j < hi; ++j) {
        if (j < 0)
          out.push_back(0);
        else if (j < plen)
          out.push_back(r.prefix[static_cast<std::size_t>(j)]);
        else
          out.push_back(static_cast<std::uint8_t>(r.base->coord(j - plen)));
      }
    }
  };
  std::visit(Visitor{lo, hi, out}, *rep_);
}

/// Outcome of a period search. `exact` marks a certificate obtained from the
/// closed-form representation; otherwise the verdict only covers the
/// inspected window, whose width is reported.
struct PeriodCheck {
  std::optional<long long> period;
  bool exact = false;
  long long window_width = 0;
};

inline PeriodCheck minimal_period(const BiSeq& z, long long max_period) {
  if (max_period < 1)
    throw std::invalid_argument("minimal_period: maxPeriod must be >= 1");
  PeriodCheck result;
  if (const auto* ep = std::get_if<BiSeq::EventuallyPeriodic>(&z.rep())) {
    // Exact: agreement over one full lcm cycle on each periodic side plus the
    // core forces agreement everywhere.
    result.exact = true;
    long long L = static_cast<long long>(ep->left.size());
    long long R = static_cast<long long>(ep->right.size());
    long long core = static_cast<long long>(ep->core.size());
    for (long long n = 1; n <= max_period; ++n) {
      long long cyc = std::lcm(std::lcm(L, R), n);
      long long lo = ep->origin - z.offset() - cyc - n - 1;
      long long hi = ep->origin - z.offset() + core + cyc + n + 1;
      result.window_width = hi - lo;
      Word w = z.window(lo, hi + n);
      bool ok = true;
      for (std::size_t j = 0; j + static_cast<std::size_t>(n) < w.size(); ++j)
        if (w[j] != w[j + static_cast<std::size_t>(n)]) { ok = false; break; }
      if (ok) {
        result.period = n;
        return result;
      }
    }
    return result;
  }
  long long W = 2 * max_period;
  result.window_width = 4 * max_period;
  Word w = z.window(-W, W + max_period);
  for (long long n = 1; n <= max_period; ++n) {
    bool ok = true;
    for (long long j = 0; j < 4 * max_period; ++j)
      if (w[static_cast<std::size_t>(j)] !=
          w[static_cast<std::size_t>(j + n)]) { ok = false; break; }
    if (ok) {
      result.period = n;
      return result;
    }
  }
  return result;
}

}  // namespace tailflow
