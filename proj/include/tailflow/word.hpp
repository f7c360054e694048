#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tailflow {

/// A finite word over {0,1} (general finite alphabets are only used by the
/// Markov-operator inputs, which carry their own state labels).
using Word = std::vector<std::uint8_t>;

inline Word parse_word(std::string_view s) {
  Word w;
  w.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("parse_word: symbol outside {0,1}");
    w.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return w;
}

inline std::string word_str(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (auto b : w) s.push_back(static_cast<char>('0' + b));
  return s;
}

inline Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

inline Word repeat(const Word& a, long long times) {
  Word w;
  w.reserve(a.size() * static_cast<std::size_t>(times > 0 ? times : 0));
  for (long long i = 0; i < times; ++i) w.insert(w.end(), a.begin(), a.end());
  return w;
}

inline long long digit_sum(const Word& w) {
  long long s = 0;
  for (auto b : w) s += b;
  return s;
}

/// The cylinder set {x : x_{start+j} = word_j for all j}.
struct CylinderSet {
  long long start = 0;
  Word word;
};

}  // namespace tailflow
