/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#pragma once

#include <cassert>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pbhyb {

using Var = int32_t;          // 1-based variable index
using Coef = int64_t;         // stored coefficients and degrees
using Wide = __int128;        // sums of coefficients, slack values
using ConstraintId = int32_t; // index into a constraint database

constexpr ConstraintId kNoConstraint = -1;

/// A boolean literal: a variable or its complement (x or 1-x).
class Lit {
 public:
  Lit() : code_(0) {}

  static Lit positive(Var v) {
    assert(v >= 1);
    return Lit(v << 1);
  }
  static Lit negative(Var v) {
    assert(v >= 1);
    return Lit((v << 1) | 1);
  }
  static Lit make(Var v, bool negated) { return negated ? negative(v) : positive(v); }
  /// DIMACS-style encoding: +v is the positive literal, -v the complement.
  static Lit fromDimacs(int dl) {
    assert(dl != 0);
    return dl > 0 ? positive(dl) : negative(-dl);
  }

  Var var() const { return static_cast<Var>(code_ >> 1); }
  bool negated() const { return code_ & 1; }
  bool valid() const { return code_ >= 2; }

  /// Dense index for literal-keyed tables; values are 2..2n+1 for n variables.
  int index() const { return code_; }

  int toDimacs() const { return negated() ? -var() : var(); }

  friend Lit operator~(Lit l) { return Lit(l.code_ ^ 1); }
  friend bool operator==(Lit a, Lit b) { return a.code_ == b.code_; }
  friend bool operator!=(Lit a, Lit b) { return a.code_ != b.code_; }
  friend bool operator<(Lit a, Lit b) { return a.code_ < b.code_; }

 private:
  explicit Lit(int code) : code_(code) {}
  int code_;
};

enum class LBool : uint8_t { True, False, Undef };

/// Exact rational with normalized sign and gcd-reduced representation.
/// Used wherever a heuristic parameter must be compared without float
/// boundary effects.
struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  Rational() = default;
  Rational(int64_t n, int64_t d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  Rational(int64_t n) : num(n), den(1) {}  // NOLINT: implicit by design

  /// Parses decimal strings exactly: "0.7" -> 7/10, "1" -> 1/1, "2.50" -> 5/2.
  static Rational fromDecimal(const std::string& text);

  std::string str() const;

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<Wide>(a.num) * b.den < static_cast<Wide>(b.num) * a.den;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }
};

std::string toString(Wide v);

/// Raised when a computed coefficient or degree leaves the supported range.
class OverflowError : public std::runtime_error {
 public:
  explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pbhyb

namespace std {
template <>
struct hash<pbhyb::Lit> {
  size_t operator()(pbhyb::Lit l) const noexcept { return std::hash<int>()(l.index()); }
};
}  // namespace std
