#include "recurflow/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "recurflow/errors.hpp"
#include "recurflow/roots.hpp"

namespace recurflow {

namespace {

using Cpx = std::complex<double>;

// Multiply polynomial (lowest-first coefficients) by the linear factor (x + r).
std::vector<Cpx> mul_linear(const std::vector<Cpx>& poly, Cpx r) {
  std::vector<Cpx> out(poly.size() + 1, Cpx(0.0, 0.0));
  for (std::size_t i = 0; i < poly.size(); ++i) {
    out[i] += poly[i] * r;
    out[i + 1] += poly[i];
  }
  return out;
}

// Roots of sum_i C_i / (lambda + k_i) = 1 via the cleared polynomial
//   P(lambda) = prod_i (lambda + k_i) - sum_i C_i prod_{j != i} (lambda + k_j).
Spectrum spectrum_from_poles(const std::vector<Cpx>& coeff,
                             const std::vector<Cpx>& pole, double tol) {
  const std::size_t n = coeff.size();
  if (n == 0) throw DegenerateKernel("kernel has no gamma-dependent terms");

  std::vector<Cpx> p{Cpx(1.0, 0.0)};
  for (std::size_t i = 0; i < n; ++i) p = mul_linear(p, pole[i]);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Cpx> q{Cpx(1.0, 0.0)};
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) q = mul_linear(q, pole[j]);
    for (std::size_t m = 0; m < q.size(); ++m) p[m] -= coeff[i] * q[m];
  }

  Spectrum s;
  s.roots = polynomial_roots(p);

  // Back-substitute into the pole form; the cleared polynomial can only gain
  // accuracy problems, never spurious roots, because every C_i is nonzero.
  for (const Cpx& z : s.roots) {
    Cpx acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) acc += coeff[i] / (z + pole[i]);
    const double res = std::abs(acc - Cpx(1.0, 0.0));
    if (!std::isfinite(res) || res > tol)
      throw RootFindingFailure("characteristic root fails back-substitution: residual " +
                               std::to_string(res));
    s.max_residual = std::max(s.max_residual, res);
  }

  std::sort(s.roots.begin(), s.roots.end(), [](const Cpx& a, const Cpx& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });

  double max_abs = 0.0;
  for (const Cpx& z : s.roots) max_abs = std::max(max_abs, std::abs(z));
  const double sep_tol = 1e-8 * (1.0 + max_abs);
  s.distinct = true;
  for (std::size_t i = 0; i < s.roots.size() && s.distinct; ++i)
    for (std::size_t j = i + 1; j < s.roots.size(); ++j)
      if (std::abs(s.roots[i] - s.roots[j]) <= sep_tol) {
        s.distinct = false;
        break;
      }

  s.in_strip = !s.roots.empty();
  s.sigma_G = -std::numeric_limits<double>::infinity();
  for (const Cpx& z : s.roots) {
    s.sigma_G = std::max(s.sigma_G, z.real());
    if (!(z.real() > -1.0 && z.real() < 0.0)) s.in_strip = false;
  }
  s.alpha_f = 1.0 - s.sigma_G;
  return s;
}

}  // namespace

std::complex<double> MonomialKernel::eval(double gamma) const {
  Cpx acc(0.0, 0.0);
  for (const Term& t : terms) acc += t.coeff * std::pow(Cpx(gamma, 0.0), t.alpha);
  return acc;
}

bool MonomialKernel::real_valued() const {
  for (const Term& t : terms)
    if (t.coeff.imag() != 0.0 || t.alpha.imag() != 0.0) return false;
  return true;
}

RealPolynomial symmetrize(const RealPolynomial& f) { return f + f.reflected(); }

RealPolynomial kernel_G(const RealPolynomial& f_tilde) {
  const auto& a = f_tilde.coeffs();
  std::vector<double> g;
  for (std::size_t n = 1; n < a.size(); ++n)
    g.push_back(static_cast<double>(n) * a[n] / static_cast<double>(n + 2));
  return RealPolynomial(g);
}

MonomialKernel to_monomials(const RealPolynomial& g) {
  MonomialKernel k;
  const auto& c = g.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != 0.0)
      k.terms.push_back({Cpx(c[i], 0.0), Cpx(static_cast<double>(i), 0.0)});
  return k;
}

MonomialKernel shift_kernel(const MonomialKernel& k, std::complex<double> s) {
  MonomialKernel out;
  out.terms.reserve(k.terms.size());
  for (const auto& t : k.terms) out.terms.push_back({t.coeff, t.alpha + s});
  return out;
}

Spectrum characteristic_spectrum(const RealPolynomial& f_tilde, double tol) {
  const auto& a = f_tilde.coeffs();
  std::vector<Cpx> coeff, pole;
  for (std::size_t n = 1; n < a.size(); ++n)
    if (a[n] != 0.0) {
      coeff.emplace_back(static_cast<double>(n) * a[n] / static_cast<double>(n + 2), 0.0);
      pole.emplace_back(static_cast<double>(n), 0.0);  // alpha + n = alpha + (n-1) + 1
    }
  return spectrum_from_poles(coeff, pole, tol);
}

Spectrum sigma_of_kernel(const MonomialKernel& k, double tol) {
  std::vector<Cpx> coeff, pole;
  for (const auto& t : k.terms) {
    coeff.push_back(t.coeff);
    pole.push_back(t.alpha + Cpx(1.0, 0.0));
  }
  return spectrum_from_poles(coeff, pole, tol);
}

AssumptionReport validate_assumption(const RealPolynomial& f) {
  AssumptionReport r;
  const RealPolynomial ft = symmetrize(f);
  const RealPolynomial g = kernel_G(ft);

  auto push = [&r](const std::string& name, double measured, double expected) {
    AssumptionReport::Item it;
    it.name = name;
    it.measured = measured;
    it.expected = expected;
    it.pass = std::abs(measured - expected) <= 1e-12;
    r.items.push_back(it);
  };
  push("integral_f", f.integral01(), 1.0);
  push("integral_f_tilde", ft.integral01(), 2.0);
  push("first_moment_f_tilde", ft.first_moment01(), 1.0);

  AssumptionReport::Item spec_item;
  spec_item.name = "spectrum_distinct_in_strip";
  spec_item.expected = 1.0;
  try {
    const Spectrum s = characteristic_spectrum(ft);
    spec_item.pass = s.distinct && s.in_strip;
    spec_item.measured = spec_item.pass ? 1.0 : 0.0;
  } catch (const Error&) {
    spec_item.pass = false;
    spec_item.measured = 0.0;
  }
  r.items.push_back(spec_item);

  r.all_pass = true;
  for (const auto& it : r.items) r.all_pass = r.all_pass && it.pass;

  r.g_integral = g.integral01();
  r.g_integral_closed_form = 1.0 - (ft.coeffs().empty() ? 0.0 : ft.coeffs()[0]) / 2.0;
  r.g_integral_matches_closed_form =
      std::abs(r.g_integral - r.g_integral_closed_form) <= 1e-12;
  r.g_integral_is_minus_one = std::abs(r.g_integral + 1.0) <= 1e-12;
  return r;
}

}  // namespace recurflow
