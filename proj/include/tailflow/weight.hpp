#pragma once

#include <cmath>
#include <map>
#include <stdexcept>

#include "tailflow/rational.hpp"

namespace tailflow {

/// A value of the form coeff * lambda^exponent with rational coeff, base, and
/// exponent. lambda must lie in (0, 1].
struct ExactWeight {
  Rational coeff{1};
  Rational lambda{1};
  Rational exponent{0};

  ExactWeight() = default;
  ExactWeight(Rational c, Rational l, Rational e)
      : coeff(std::move(c)), lambda(std::move(l)), exponent(std::move(e)) {
    if (!(Rational(0) < lambda) || lambda > Rational(1))
      throw std::invalid_argument("ExactWeight: lambda must be in (0,1]");
    if (coeff < Rational(0))
      throw std::invalid_argument("ExactWeight: negative coefficient");
  }

  double eval() const {
    return coeff.to_double() *
           std::pow(lambda.to_double(), exponent.to_double());
  }

  friend ExactWeight operator*(const ExactWeight& a, const ExactWeight& b) {
    if (a.lambda != b.lambda && !a.coeff.is_zero() && !b.coeff.is_zero() &&
        a.exponent != Rational(0) && b.exponent != Rational(0))
      throw std::invalid_argument("ExactWeight: base mismatch");
    Rational base = (a.exponent == Rational(0)) ? b.lambda : a.lambda;
    return ExactWeight(a.coeff * b.coeff, base, a.exponent + b.exponent);
  }
};

/// Formal sum of terms coeff * lambda^exponent over a common base lambda.
/// Stored in a canonical form where each key is a fractional exponent in
/// [0, 1) whose lambda-power is irrational; integer lambda-powers are folded
/// into the rational coefficients. With that normalization, map equality is a
/// correct equality certificate for bases that are not perfect powers in a
/// way that makes any surviving fractional power rational.
class WeightSum {
public:
  explicit WeightSum(Rational lambda) : lambda_(std::move(lambda)) {
    if (!(Rational(0) < lambda_) || lambda_ > Rational(1))
      throw std::invalid_argument("WeightSum: lambda must be in (0,1]");
  }

  const Rational& lambda() const { return lambda_; }

  void add(const ExactWeight& w) {
    if (w.coeff.is_zero()) return;
    if (w.exponent != Rational(0) && w.lambda != lambda_)
      throw std::invalid_argument("WeightSum: base mismatch");
    add_term(w.coeff, w.exponent);
  }

  void add(const WeightSum& other) {
    if (other.lambda_ != lambda_)
      throw std::invalid_argument("WeightSum: base mismatch");
    for (const auto& [f, c] : other.terms_) add_raw(c, f);
  }

  void scale(const ExactWeight& w) {
    if (w.exponent != Rational(0) && w.lambda != lambda_)
      throw std::invalid_argument("WeightSum: base mismatch");
    std::map<Rational, Rational> old;
    old.swap(terms_);
    for (const auto& [f, c] : old) add_term(c * w.coeff, f + w.exponent);
  }

  bool is_zero() const {
    for (const auto& [f, c] : terms_)
      if (!c.is_zero()) return false;
    return true;
  }

  double eval() const {
    double l = lambda_.to_double();
    double v = 0.0;
    for (const auto& [f, c] : terms_)
      v += c.to_double() * std::pow(l, f.to_double());
    return v;
  }

  friend bool operator==(const WeightSum& a, const WeightSum& b) {
    if (a.lambda_ != b.lambda_) return false;
    WeightSum d = a;
    for (const auto& [f, c] : b.terms_) d.add_raw(-c, f);
    for (const auto& [f, c] : d.terms_)
      if (!c.is_zero()) return false;
    return true;
  }
  friend bool operator!=(const WeightSum& a, const WeightSum& b) {
    return !(a == b);
  }

private:
  // Splits the exponent into integer and fractional parts, folds the integer
  // lambda-power into the coefficient, and collapses any fractional power
  // that happens to be rational (perfect-power base).
  void add_term(Rational coeff, const Rational& exponent) {
    long long k = exponent.floor();
    Rational frac = exponent - Rational(k);
    coeff *= lambda_.pow(k);
    if (!frac.is_zero()) {
      auto root = rational_root(lambda_.pow(frac.num()), frac.den());
      if (root) {
        coeff *= *root;
        frac = Rational(0);
      }
    }
    add_raw(coeff, frac);
  }

  // Inserting a class whose lambda-power differs from an existing class by a
  // rational factor folds it into that class, keeping the representation
  // canonical (distinct surviving classes have pairwise irrational ratios).
  void add_raw(Rational coeff, Rational frac) {
    for (const auto& [g, cg] : terms_) {
      if (g == frac) break;
      Rational diff = frac - g;
      Rational w = diff.abs();
      auto ratio = rational_root(lambda_.pow(w.num()), w.den());
      if (ratio) {
        coeff = (diff > Rational(0)) ? coeff * *ratio : coeff / *ratio;
        frac = g;
        break;
      }
    }
    auto it = terms_.find(frac);
    if (it == terms_.end())
      terms_.emplace(frac, coeff);
    else {
      it->second += coeff;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Rational lambda_;
  std::map<Rational, Rational> terms_;
};

}  // namespace tailflow
