#include "recurflow/numerics.hpp"

#include "recurflow/errors.hpp"

#include <algorithm>
#include <cmath>

namespace recurflow {

QuadratureRule gauss_legendre_01(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Roots of P_n on (-1,1) by Newton from the Chebyshev-like initial guess;
  // symmetric, so only the lower half is iterated.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.nodes[i] = 0.5 * (1.0 - x);  // map [-1,1] -> [0,1], ascending
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

double gauss_quadrature(const std::function<double(double)>& g, int nodes) {
  QuadratureRule rule = gauss_legendre_01(nodes);
  CompensatedAccumulator acc;
  for (int i = 0; i < nodes; ++i) acc.add(rule.weights[i] * g(rule.nodes[i]));
  return acc.value();
}

double singular_beta_integral(double sigma, int nodes) {
  if (!(sigma < 1.0)) throw ConfigError("singular_beta_integral requires sigma < 1");
  // Transformed integrand: 4^sigma (pi/4) cosh t * cosh(w)^{2 sigma - 2},
  // w = (pi/2) sinh t.  Truncate where the tail drops below ~1e-33.
  const int half = std::max(nodes / 2, 40);
  const double t_max = std::asinh(75.0 / ((1.0 - sigma) * M_PI));
  const double h = t_max / half;
  CompensatedAccumulator acc;
  for (int j = -half; j <= half; ++j) {
    const double t = h * j;
    const double w = M_PI / 2.0 * std::sinh(t);
    const double log_cosh_w =
        std::fabs(w) + std::log1p(std::exp(-2.0 * std::fabs(w))) - std::log(2.0);
    acc.add(std::cosh(t) * std::exp((2.0 * sigma - 2.0) * log_cosh_w));
  }
  return std::pow(4.0, sigma) * (M_PI / 4.0) * h * acc.value();
}

ComplexMatrix operator*(const ComplexMatrix& x, const ComplexMatrix& y) {
  ComplexMatrix r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      Complex v = x(i, k);
      if (v == Complex{}) continue;
      for (int j = 0; j < x.n; ++j) r(i, j) += v * y(k, j);
    }
  return r;
}

ComplexMatrix solve(ComplexMatrix a, ComplexMatrix b) {
  int n = a.n;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) == 0.0) throw NonFinite("singular matrix in solve");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(b(piv, j), b(col, j));
      }
    Complex d = a(col, col);
    for (int r = col + 1; r < n; ++r) {
      Complex f = a(r, col) / d;
      if (f == Complex{}) continue;
      for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      for (int j = 0; j < n; ++j) b(r, j) -= f * b(col, j);
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    for (int j = 0; j < n; ++j) {
      Complex s = b(col, j);
      for (int k = col + 1; k < n; ++k) s -= a(col, k) * b(k, j);
      b(col, j) = s / a(col, col);
    }
  }
  return b;
}

double spectral_norm(const ComplexMatrix& m, double tol, std::uint64_t seed) {
  for (const Complex& v : m.a)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NonFinite("spectral_norm: non-finite matrix entry");
  int n = m.n;
  if (n < 1) throw NonFinite("spectral_norm: empty matrix");

  // H = M* M, Hermitian positive semidefinite.
  ComplexMatrix h(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (int k = 0; k < n; ++k) s += std::conj(m(k, i)) * m(k, j);
      h(i, j) = s;
    }

  // All-ones start plus a fixed-seed perturbation so eigvectors orthogonal to
  // the ones vector are still reachable; deterministic for a given seed.
  std::vector<Complex> v(n);
  std::uint64_t state = seed ? seed : 1;
  auto next = [&state]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<double>(state >> 11) / 9007199254740992.0;  // [0,1)
  };
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.125 * (next() - 0.5);

  double lambda = 0.0;
  double prev = -1.0;
  for (int iter = 0; iter < 20000; ++iter) {
    std::vector<Complex> w(n, Complex{});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w[i] += h(i, j) * v[j];
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += std::real(std::conj(v[i]) * w[i]);
      den += std::norm(v[i]);
    }
    if (den == 0.0) return 0.0;  // zero matrix
    lambda = num / den;
    double wn = 0.0;
    for (int i = 0; i < n; ++i) wn += std::norm(w[i]);
    wn = std::sqrt(wn);
    if (wn == 0.0) return 0.0;
    for (int i = 0; i < n; ++i) v[i] = w[i] / wn;
    if (prev >= 0.0 && std::fabs(lambda - prev) <= tol * std::max(lambda, 1e-300)) break;
    prev = lambda;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace recurflow
