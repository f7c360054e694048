#pragma once

#include <map>

#include "tailflow/measure.hpp"
#include "tailflow/rational.hpp"
#include "tailflow/word.hpp"

namespace tailflow {

/// Exact factor frequencies of the Thue-Morse subshift (rule 0->01, 1->10),
/// i.e. the cylinder masses of its unique shift-invariant measure.
///
/// Every occurrence of a word w at position 2i'+r in the sequence comes from
/// an ancestor word v at position i' with the image containing w at offset r,
/// so freq(w) = (1/2) sum_{r=0,1} sum_{v : zeta(v)[r..r+|w|-1] = w} freq(v).
/// The length-2 system is self-referential and its fixed point is
/// freq(01) = freq(10) = 1/3, freq(00) = freq(11) = 1/6.
class ThueMorseFrequencies {
public:
  Rational freq(const Word& w) {
    auto it = memo_.find(w);
    if (it != memo_.end()) return it->second;
    Rational v = compute(w);
    memo_.emplace(w, v);
    return v;
  }

private:
  Rational compute(const Word& w) {
    std::size_t L = w.size();
    if (L == 0) return Rational(1);
    if (L == 1) return Rational(1, 2);
    if (L == 2) {
      return (w[0] == w[1]) ? Rational(1, 6) : Rational(1, 3);
    }
    Rational total(0);
    for (int r = 0; r <= 1; ++r) {
      std::size_t vl = (L + static_cast<std::size_t>(r) + 1) / 2;
      for (std::size_t bits = 0; bits < (static_cast<std::size_t>(1) << vl); ++bits) {
        Word img;
        img.reserve(2 * vl);
        for (std::size_t j = 0; j < vl; ++j) {
          int s = (bits >> (vl - 1 - j)) & 1;
          img.push_back(static_cast<std::uint8_t>(s));
          img.push_back(static_cast<std::uint8_t>(1 - s));
        }
        bool match = true;
        for (std::size_t j = 0; j < L; ++j)
          if (img[static_cast<std::size_t>(r) + j] != w[j]) { match = false; break; }
        if (!match) continue;
        Word v = index_word(bits, static_cast<int>(vl));
        total += freq(v);
      }
    }
    return total / Rational(2);
  }

  std::map<Word, Rational> memo_;
};

/// Exact shift-invariant cylinder table for the Thue-Morse measure on the
/// window [start, start + depth). `lambda` seeds the exact-weight base so the
/// table can be reweighted later without a base change.
inline CylinderTableMeasure thue_morse_measure(long long start, int depth,
                                               const Rational& lambda = Rational(1, 2)) {
  if (depth < 1 || depth > 24)
    throw std::invalid_argument("thue_morse_measure: depth out of range");
  ThueMorseFrequencies tm;
  CylinderTableMeasure t;
  t.start = start;
  t.depth = depth;
  t.lambda = lambda;
  t.masses.resize(static_cast<std::size_t>(1) << depth);
  t.exact = std::vector<ExactWeight>(
      t.masses.size(), ExactWeight(Rational(0), lambda, Rational(0)));
  for (std::size_t i = 0; i < t.masses.size(); ++i) {
    Rational f = tm.freq(index_word(i, depth));
    t.masses[i] = f.to_double();
    (*t.exact)[i] = ExactWeight(f, lambda, Rational(0));
  }
  return t;
}

}  // namespace tailflow
