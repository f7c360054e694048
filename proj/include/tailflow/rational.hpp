#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tailflow {

/// Exact rational number with 64-bit numerator/denominator.
/// Intermediate products use 128-bit arithmetic; results that do not fit
/// back into 64 bits after reduction throw std::overflow_error.
class Rational {
public:
  constexpr Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}
  Rational(long long n, long long d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    num_ = n;
    den_ = d;
  }

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  long long floor() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  Rational operator-() const { return make(-static_cast<__int128>(num_), den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.den_ +
                 static_cast<__int128>(b.num_) * a.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return make(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.num_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return make(n, d);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::invalid_argument("Rational: division by zero");
    __int128 n = static_cast<__int128>(a.num_) * b.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.num_;
    return make(n, d);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ <
           static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  /// Integer power; k may be negative for nonzero values.
  Rational pow(long long k) const {
    if (k < 0) return (Rational(1) / *this).pow(-k);
    Rational r(1);
    Rational base = *this;
    while (k > 0) {
      if (k & 1) r *= base;
      base = (k > 1) ? base * base : base;
      k >>= 1;
    }
    return r;
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Parses "a", "-a", or "a/b".
  static std::optional<Rational> parse(std::string_view s) {
    auto slash = s.find('/');
    try {
      if (slash == std::string_view::npos) {
        size_t pos = 0;
        long long n = std::stoll(std::string(s), &pos);
        if (pos != s.size()) return std::nullopt;
        return Rational(n);
      }
      size_t p1 = 0, p2 = 0;
      std::string ns(s.substr(0, slash)), ds(s.substr(slash + 1));
      long long n = std::stoll(ns, &p1);
      long long d = std::stoll(ds, &p2);
      if (p1 != ns.size() || p2 != ds.size() || d == 0) return std::nullopt;
      return Rational(n, d);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

private:
  static Rational make(__int128 n, __int128 d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 an = n < 0 ? -n : n;
    __int128 g = gcd128(an, d);
    if (g > 1) { n /= g; d /= g; }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("Rational: 64-bit overflow");
    Rational r;
    r.num_ = static_cast<long long>(n);
    r.den_ = static_cast<long long>(d);
    return r;
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  long long num_;
  long long den_;
};

/// Exact k-th root of a nonnegative integer, if one exists.
inline std::optional<long long> integer_root(long long v, long long k) {
  if (v < 0 || k <= 0) return std::nullopt;
  if (v == 0) return 0;
  if (k == 1) return v;
  long long r = static_cast<long long>(std::llround(std::pow(static_cast<double>(v), 1.0 / static_cast<double>(k))));
  for (long long c = r > 2 ? r - 2 : 0; c <= r + 2; ++c) {
    __int128 p = 1;
    bool over = false;
    for (long long i = 0; i < k; ++i) {
      p *= c;
      if (p > static_cast<__int128>(INT64_MAX)) { over = true; break; }
    }
    if (!over && p == v) return c;
  }
  return std::nullopt;
}

/// Exact k-th root of a positive rational, if rational.
inline std::optional<Rational> rational_root(const Rational& r, long long k) {
  if (r.num() <= 0) return std::nullopt;
  auto n = integer_root(r.num(), k);
  auto d = integer_root(r.den(), k);
  if (n && d) return Rational(*n, *d);
  return std::nullopt;
}

}  // namespace tailflow
