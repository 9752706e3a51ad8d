#pragma once

// Shared numerical primitives: power-of-two scaled scalars (for sequences that
// grow/decay geometrically), compensated accumulation, Gauss-Legendre
// quadrature with a singularity-absorbing substitution, and spectral norms of
// small complex matrices via power iteration.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "recurflow/double_double.hpp"
#include "recurflow/errors.hpp"

namespace recurflow {

// ---------------------------------------------------------------------------
// Scaled scalars: value = mantissa * 2^exponent with |mantissa| in [1,2) or 0.
// The exponent is a full-width integer, so products of geometrically growing
// sequences never overflow (|exponent| < 2^60 stays exact).
// ---------------------------------------------------------------------------

namespace scaled_detail {
inline void split(double v, double& m, std::int64_t& e) {
  int ei = 0;
  double f = std::frexp(v, &ei);  // |f| in [0.5,1)
  m = 2.0 * f;
  e = ei - 1;
}
}  // namespace scaled_detail

template <typename T>
struct Scaled {
  T mantissa{0.0};          // |mantissa| in [1,2), or 0 when the value is 0
  std::int64_t exponent{0};

  Scaled() = default;
  Scaled(T m, std::int64_t e) : mantissa(m), exponent(e) {}

  bool is_zero() const { return mantissa_hi() == 0.0; }
  double mantissa_hi() const {
    if constexpr (std::is_same_v<T, DoubleDouble>) return mantissa.hi;
    else return mantissa;
  }

  static Scaled from(T v) {
    Scaled s;
    double hi;
    if constexpr (std::is_same_v<T, DoubleDouble>) hi = v.hi;
    else hi = v;
    if (hi == 0.0) return s;
    double m;
    std::int64_t e;
    scaled_detail::split(hi, m, e);
    if constexpr (std::is_same_v<T, DoubleDouble>) {
      s.mantissa = dd_ldexp(v, static_cast<int>(-e));
    } else {
      s.mantissa = m;
      (void)v;
    }
    s.exponent = e;
    return s;
  }

  // Restore normalization after mantissa arithmetic left |mantissa| outside
  // [1,2); the shift is always small for products/sums of normalized inputs.
  void normalize() {
    double hi = mantissa_hi();
    if (hi == 0.0) {
      exponent = 0;
      return;
    }
    double m;
    std::int64_t e;
    scaled_detail::split(hi, m, e);
    if (e != 0) {
      if constexpr (std::is_same_v<T, DoubleDouble>) {
        mantissa = dd_ldexp(mantissa, static_cast<int>(-e));
      } else {
        mantissa = std::ldexp(mantissa, static_cast<int>(-e));
      }
      exponent += e;
    }
  }

  double to_double() const {
    if (is_zero()) return 0.0;
    if (exponent > 1100) return mantissa_hi() > 0 ? HUGE_VAL : -HUGE_VAL;
    if (exponent < -1100) return 0.0;
    if constexpr (std::is_same_v<T, DoubleDouble>) {
      return std::ldexp(mantissa.to_double(), static_cast<int>(exponent));
    } else {
      return std::ldexp(mantissa, static_cast<int>(exponent));
    }
  }

  // Natural log of |value|; exact integer exponent contribution is kept
  // separate from the mantissa log until the final assembly.
  T log_abs() const {
    if constexpr (std::is_same_v<T, DoubleDouble>) {
      return dd_log(dd_abs(mantissa)) + dd_constants::ln2 * static_cast<double>(exponent);
    } else {
      DoubleDouble l = DoubleDouble(std::log(std::fabs(mantissa))) +
                       dd_constants::ln2 * static_cast<double>(exponent);
      return l.to_double();
    }
  }
};

template <typename T>
inline Scaled<T> operator*(const Scaled<T>& a, const Scaled<T>& b) {
  if (a.is_zero() || b.is_zero()) return {};
  Scaled<T> r(a.mantissa * b.mantissa, a.exponent + b.exponent);
  r.normalize();
  return r;
}

using ScaledReal = Scaled<double>;

inline ScaledReal pow_int(ScaledReal base, std::int64_t n) {
  ScaledReal r = ScaledReal::from(1.0);
  bool invert = n < 0;
  std::uint64_t k = invert ? static_cast<std::uint64_t>(-n) : static_cast<std::uint64_t>(n);
  while (k) {
    if (k & 1) r = r * base;
    base = base * base;
    k >>= 1;
  }
  if (invert) {
    ScaledReal inv;
    inv.mantissa = 1.0 / r.mantissa;       // in (0.5,1]
    inv.exponent = -r.exponent;
    inv.normalize();
    return inv;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Compensated (Kahan-Babuska / Neumaier) accumulation.  Unlike plain Kahan,
// the compensation survives terms larger than the running sum.
// ---------------------------------------------------------------------------

struct CompensatedAccumulator {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      compensation += (sum - t) + x;
    else
      compensation += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + compensation; }
};

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature on [0,1].
// ---------------------------------------------------------------------------

struct QuadratureRule {
  std::vector<double> nodes;    // on [0,1]
  std::vector<double> weights;  // sum to 1
};

// Nodes by Newton iteration on P_n with the three-term recurrence.
QuadratureRule gauss_legendre_01(int n);

double gauss_quadrature(const std::function<double(double)>& g, int nodes);

// C_sigma = int_0^1 gamma^{-sigma} (1-gamma)^{-sigma} dgamma for sigma in
// (0,1).  Evaluated by tanh-sinh quadrature: with
// gamma = (1 + tanh((pi/2) sinh t))/2 the product gamma(1-gamma) is exactly
// 1/(4 cosh^2 w), w = (pi/2) sinh t, so the transformed integrand decays
// double-exponentially and the trapezoid sum converges to near machine
// precision.  `nodes` is the total number of abscissae.
double singular_beta_integral(double sigma, int nodes = 400);

// ---------------------------------------------------------------------------
// Small dense complex matrices (only what the product scans need).
// ---------------------------------------------------------------------------

using Complex = std::complex<double>;

struct ComplexMatrix {
  int n = 0;
  std::vector<Complex> a;  // row-major n*n

  ComplexMatrix() = default;
  explicit ComplexMatrix(int dim) : n(dim), a(static_cast<size_t>(dim) * dim) {}

  Complex& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const Complex& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  static ComplexMatrix identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
};

ComplexMatrix operator*(const ComplexMatrix& x, const ComplexMatrix& y);

// Solve A X = B by Gaussian elimination with partial pivoting (N is tiny).
ComplexMatrix solve(ComplexMatrix a, ComplexMatrix b);

// ||M||_2 via power iteration on M* M; deterministic given the seed.
double spectral_norm(const ComplexMatrix& m, double tol = 1e-12, std::uint64_t seed = 1);

}  // namespace recurflow
