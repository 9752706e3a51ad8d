#pragma once

// Unevaluated double-double arithmetic: a value is the exact sum hi + lo with
// |lo| <= ulp(hi)/2, giving ~106 bits of significand.  Only the operations the
// simulation engine needs are provided (ring ops, division, exp/log on
// moderate arguments); this is deliberately not a general multiprecision type.

#include <cmath>
#include <cstdint>

namespace recurflow {

struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double h) : hi(h), lo(0.0) {}
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

  double to_double() const { return hi + lo; }
  explicit operator double() const { return to_double(); }
};

namespace dd_detail {

// Error-free transforms (Dekker/Knuth).
inline DoubleDouble two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DoubleDouble quick_two_sum(double a, double b) {  // requires |a| >= |b|
  double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace dd_detail

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
  using namespace dd_detail;
  DoubleDouble s = two_sum(a.hi, b.hi);
  DoubleDouble t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }
inline DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }

inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
  using namespace dd_detail;
  DoubleDouble p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline DoubleDouble operator*(DoubleDouble a, double b) {
  using namespace dd_detail;
  DoubleDouble p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return quick_two_sum(p.hi, p.lo);
}
inline DoubleDouble operator*(double a, DoubleDouble b) { return b * a; }

inline DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
  using namespace dd_detail;
  double q1 = a.hi / b.hi;
  DoubleDouble r = a - b * q1;
  double q2 = r.hi / b.hi;
  r = r - b * q2;
  double q3 = r.hi / b.hi;
  DoubleDouble q = quick_two_sum(q1, q2);
  return q + DoubleDouble(q3);
}
inline DoubleDouble operator/(DoubleDouble a, double b) { return a / DoubleDouble(b); }
inline DoubleDouble operator/(double a, DoubleDouble b) { return DoubleDouble(a) / b; }

inline DoubleDouble& operator+=(DoubleDouble& a, DoubleDouble b) { return a = a + b; }
inline DoubleDouble& operator-=(DoubleDouble& a, DoubleDouble b) { return a = a - b; }
inline DoubleDouble& operator*=(DoubleDouble& a, DoubleDouble b) { return a = a * b; }
inline DoubleDouble& operator/=(DoubleDouble& a, DoubleDouble b) { return a = a / b; }

inline bool operator==(DoubleDouble a, DoubleDouble b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator<(DoubleDouble a, DoubleDouble b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator>(DoubleDouble a, DoubleDouble b) { return b < a; }

inline DoubleDouble dd_abs(DoubleDouble a) { return a.hi < 0.0 ? -a : a; }

// Exact power-of-two scaling.
inline DoubleDouble dd_ldexp(DoubleDouble a, int n) {
  return {std::ldexp(a.hi, n), std::ldexp(a.lo, n)};
}

namespace dd_constants {
inline constexpr DoubleDouble ln2{6.931471805599452862e-01, 2.3190468138462995584e-17};
inline constexpr DoubleDouble e{2.718281828459045091e+00, 1.4456468917292502e-16};
inline constexpr DoubleDouble pi{3.141592653589793116e+00, 1.2246467991473531772e-16};
}  // namespace dd_constants

// exp for |x| up to a few thousand: reduce x = k*ln2 + r, evaluate e^r by a
// scaled-and-squared Taylor series, then rebuild with exact ldexp.
inline DoubleDouble dd_exp(DoubleDouble x) {
  if (x.hi > 709.0) return {HUGE_VAL, 0.0};
  if (x.hi < -709.0) return {0.0, 0.0};
  double k = std::nearbyint(x.hi / dd_constants::ln2.hi);
  DoubleDouble r = x - dd_constants::ln2 * k;
  constexpr int kScale = 9;  // |r| <= ln2/2, scaled down to ~6.8e-4
  r = dd_ldexp(r, -kScale);
  // Taylor: sum_{n>=1} r^n / n!  (the leading 1 is added during unscaling)
  DoubleDouble term = r;
  DoubleDouble sum = r;
  double fact = 1.0;
  for (int n = 2; n <= 12; ++n) {
    term = term * r;
    fact *= n;
    sum += term / fact;
  }
  // Unscale: (1+s)^2 = 1 + (2s + s^2), applied kScale times on s = e^r' - 1.
  DoubleDouble s = sum;
  for (int i = 0; i < kScale; ++i) s = dd_ldexp(s, 1) + s * s;
  s += DoubleDouble(1.0);
  return dd_ldexp(s, static_cast<int>(k));
}

// expm1 with full relative accuracy for small arguments.
inline DoubleDouble dd_expm1(DoubleDouble x) {
  if (dd_abs(x).hi > 0.125) return dd_exp(x) - DoubleDouble(1.0);
  DoubleDouble term = x;
  DoubleDouble sum = x;
  double fact = 1.0;
  for (int n = 2; n <= 20; ++n) {
    term = term * x;
    fact *= n;
    sum += term / fact;
    if (std::fabs(term.hi) / fact < 1e-40 * std::fabs(sum.hi)) break;
  }
  return sum;
}

// log via one Newton correction of the double-precision seed:
// y <- y + (x*e^{-y} - 1); one step lifts 1e-16 accuracy to ~1e-32.
inline DoubleDouble dd_log(DoubleDouble x) {
  DoubleDouble y(std::log(x.hi));
  y = y + (x * dd_exp(-y) - DoubleDouble(1.0));
  y = y + (x * dd_exp(-y) - DoubleDouble(1.0));
  return y;
}

inline DoubleDouble dd_log1p(DoubleDouble x) {
  if (dd_abs(x).hi > 0.125) return dd_log(DoubleDouble(1.0) + x);
  // atanh series on t = x/(2+x): log(1+x) = 2 atanh(t), |t| <= 1/17.
  DoubleDouble t = x / (DoubleDouble(2.0) + x);
  DoubleDouble t2 = t * t;
  DoubleDouble term = t;
  DoubleDouble sum = t;
  for (int n = 3; n <= 31; n += 2) {
    term = term * t2;
    sum += term / static_cast<double>(n);
    if (std::fabs(term.hi) < 1e-38 * std::fabs(sum.hi)) break;
  }
  return dd_ldexp(sum, 1);
}

inline bool dd_isfinite(DoubleDouble a) { return std::isfinite(a.hi) && std::isfinite(a.lo); }

}  // namespace recurflow
