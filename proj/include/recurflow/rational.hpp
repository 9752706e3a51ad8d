#pragma once

// Exact rational arithmetic for the small-p oracle.  Backed by GMP's mpq_class
// (arbitrary-precision integers, canonical reduced form with positive
// denominator) behind a thin interface that enforces the division contract.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "recurflow/errors.hpp"

namespace recurflow {

class Rational {
 public:
  Rational() : v_(0) {}
  Rational(long num) : v_(num) {}
  Rational(long num, long den) {
    if (den == 0) throw DivideByZero("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  // Doubles are dyadic rationals; the conversion is exact.
  static Rational from_double(double d) {
    Rational r;
    r.v_ = mpq_class(d);
    return r;
  }

  Rational operator+(const Rational& o) const { return Rational(v_ + o.v_); }
  Rational operator-(const Rational& o) const { return Rational(v_ - o.v_); }
  Rational operator*(const Rational& o) const { return Rational(v_ * o.v_); }
  Rational operator/(const Rational& o) const {
    if (o.v_ == 0) throw DivideByZero("rational division by zero");
    return Rational(v_ / o.v_);
  }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }

  Rational pow(std::int64_t n) const {
    if (n < 0) return Rational(1) / pow(-n);
    Rational base = *this, r(1);
    std::uint64_t k = static_cast<std::uint64_t>(n);
    while (k) {
      if (k & 1) r = r * base;
      base = base * base;
      k >>= 1;
    }
    return r;
  }

  bool operator==(const Rational& o) const { return v_ == o.v_; }
  bool operator!=(const Rational& o) const { return v_ != o.v_; }
  bool operator<(const Rational& o) const { return v_ < o.v_; }
  bool is_zero() const { return v_ == 0; }
  bool is_positive() const { return v_ > 0; }

  double to_double() const { return v_.get_d(); }
  std::string str() const { return v_.get_str(); }

 private:
  explicit Rational(mpq_class v) : v_(std::move(v)) {}
  mpq_class v_;
};

// Horner evaluation of a polynomial with exact rational coefficients.
inline Rational rational_polyval(const std::vector<Rational>& coeffs, const Rational& x) {
  Rational r(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * x + *it;
  return r;
}

}  // namespace recurflow
