#include "recurflow/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "recurflow/roots.hpp"

namespace recurflow {

RealPolynomial RealPolynomial::reflected() const {
  if (c_.empty()) return RealPolynomial{};
  std::vector<double> r(c_.size(), 0.0);
  // Pascal row for (1 - g)^n: binom[k] = C(n, k).
  std::vector<double> binom{1.0};
  for (std::size_t n = 0; n < c_.size(); ++n) {
    double sign = 1.0;
    for (std::size_t k = 0; k <= n; ++k) {
      r[k] += c_[n] * binom[k] * sign;
      sign = -sign;
    }
    binom.push_back(0.0);
    for (std::size_t k = binom.size() - 1; k > 0; --k) binom[k] += binom[k - 1];
  }
  return RealPolynomial(std::move(r));
}

double RealPolynomial::sup_norm01() const {
  if (c_.empty()) return 0.0;
  double m = std::max(std::abs(eval(0.0)), std::abs(eval(1.0)));
  const RealPolynomial d = derivative();
  if (d.is_zero()) return m;
  std::vector<std::complex<double>> dc;
  for (double a : d.coeffs()) dc.emplace_back(a, 0.0);
  for (const auto& z : polynomial_roots(dc)) {
    if (std::abs(z.imag()) > 1e-9) continue;
    const double x = z.real();
    if (x > 0.0 && x < 1.0) m = std::max(m, std::abs(eval(x)));
  }
  return m;
}

}  // namespace recurflow
