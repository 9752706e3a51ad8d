#include "recurflow/roots.hpp"

#include <algorithm>
#include <cmath>

#include "recurflow/errors.hpp"

namespace recurflow {

namespace {

using C = std::complex<double>;

C eval_poly(const std::vector<C>& a, C z, C* deriv) {
  C p = a.back(), d = 0.0;
  for (std::size_t i = a.size() - 1; i-- > 0;) {
    d = d * z + p;
    p = p * z + a[i];
  }
  if (deriv) *deriv = d;
  return p;
}

}  // namespace

std::vector<C> polynomial_roots(const std::vector<C>& coeffs) {
  std::vector<C> a = coeffs;
  while (!a.empty() && a.back() == C{}) a.pop_back();
  if (a.size() <= 1) return {};
  int n = static_cast<int>(a.size()) - 1;

  if (n == 1) return {-a[0] / a[1]};
  if (n == 2) {
    C A = a[2], B = a[1], Cc = a[0];
    if (A.imag() == 0.0 && B.imag() == 0.0 && Cc.imag() == 0.0) {
      const double ar = A.real(), br = B.real(), cr = Cc.real();
      const double disc2 = br * br - 4.0 * ar * cr;
      if (disc2 < 0.0) {
        // Conjugate pair: the shared real part -b/2a is computed exactly
        // rather than through a complex square root.
        const double re = -br / (2.0 * ar);
        const double im = std::sqrt(-disc2) / (2.0 * std::fabs(ar));
        return {C(re, im), C(re, -im)};
      }
      const double s = std::sqrt(disc2);
      const double q = -0.5 * (br + (br >= 0.0 ? s : -s));
      if (q == 0.0) return {C{}, C{}};  // b = 0 and c = 0
      return {C(q / ar, 0.0), C(cr / q, 0.0)};
    }
    // Stable quadratic formula: q = -(b + sign*sqrt(disc))/2, roots q/a, c/q.
    C disc = std::sqrt(B * B - 4.0 * A * Cc);
    C q = (std::real(std::conj(B) * disc) >= 0.0) ? -0.5 * (B + disc) : -0.5 * (B - disc);
    if (q == C{}) {  // b = 0 and c = 0
      C r = std::sqrt(-Cc / A);
      return {r, -r};
    }
    return {q / A, Cc / q};
  }

  // Aberth-Ehrlich: starts on a circle of the Cauchy radius, offset angles.
  double radius = 0.0;
  for (int i = 0; i < n; ++i) radius = std::max(radius, std::abs(a[i] / a[n]));
  radius = 1.0 + radius;
  std::vector<C> z(n);
  for (int i = 0; i < n; ++i) {
    double th = 2.0 * M_PI * i / n + 0.4;
    z[i] = radius * C(std::cos(th), std::sin(th));
  }

  const int kMaxIter = 500;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      C d;
      C p = eval_poly(a, z[i], &d);
      if (p == C{}) continue;
      C w = (d == C{}) ? C(1e-30, 0) : p / d;
      C s = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) s += 1.0 / (z[i] - z[j]);
      C corr = w / (1.0 - w * s);
      z[i] -= corr;
      worst = std::max(worst, std::abs(corr) / (1.0 + std::abs(z[i])));
    }
    if (worst < 1e-14) return z;
  }
  throw RootFindingFailure("polynomial root iteration did not converge in 500 steps");
}

}  // namespace recurflow
