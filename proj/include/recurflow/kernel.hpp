#pragma once

// The weight polynomial f, its symmetrization, the integral kernel G of the
// linearized system, and the characteristic spectrum that sets the decay
// exponent alpha_f.

#include <complex>
#include <string>
#include <vector>

#include "recurflow/polynomial.hpp"

namespace recurflow {

// Finite sum of generalized monomials  K(gamma) = sum_i C_i gamma^{alpha_i}
// with pairwise-distinct (possibly complex) exponents; zero-coefficient terms
// are never stored.
struct MonomialKernel {
  struct Term {
    std::complex<double> coeff;
    std::complex<double> alpha;
  };
  std::vector<Term> terms;

  std::complex<double> eval(double gamma) const;
  bool real_valued() const;  // all coeffs and exponents have zero imag part
};

struct Spectrum {
  std::vector<std::complex<double>> roots;  // sorted by Re desc, then Im desc
  double sigma_G = 0.0;                     // max_i Re(root_i)
  double alpha_f = 0.0;                     // 1 - sigma_G
  bool distinct = false;
  bool in_strip = false;  // all roots satisfy -1 < Re < 0
  double max_residual = 0.0;  // worst back-substitution residual
};

// f~(gamma) = f(gamma) + f(1-gamma).
RealPolynomial symmetrize(const RealPolynomial& f);

// G(gamma) = int_0^1 f~'(t gamma) t^2 dt  =  sum_{n>=1} (n a_n/(n+2)) gamma^{n-1}.
RealPolynomial kernel_G(const RealPolynomial& f_tilde);

// Kernel polynomial as monomial terms (C_i = coeff of gamma^{i-1}).
MonomialKernel to_monomials(const RealPolynomial& g);

// Replace alpha_i by alpha_i + s; every characteristic root moves by -s.
// Shifting by s = sigma_{i0} (a maximal root) makes max Re sigma = 0.
MonomialKernel shift_kernel(const MonomialKernel& k, std::complex<double> s);

// Roots of sum_n n a_n / ((n+2)(n+alpha)) = 1 where a_n are f~ coefficients.
// Throws DegenerateKernel when f~ has no gamma-dependent terms and
// RootFindingFailure when iteration fails or residual exceeds tol.
Spectrum characteristic_spectrum(const RealPolynomial& f_tilde, double tol = 1e-10);

// Roots of sum_i C_i / (lambda + alpha_i + 1) = 1 in the general (C, alpha)
// parameterization; coincides with characteristic_spectrum when K is the
// monomial form of kernel_G(f~).
Spectrum sigma_of_kernel(const MonomialKernel& k, double tol = 1e-10);

struct AssumptionReport {
  struct Item {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double expected = 0.0;
  };
  std::vector<Item> items;
  bool all_pass = false;
  // The kernel integral: exact value, the closed form 1 - f~(0)/2 it should
  // equal whenever int f~ g dg = 1, and whether it equals the commonly quoted
  // constant -1 (true for f~(0) = 4 only).
  double g_integral = 0.0;
  double g_integral_closed_form = 0.0;
  bool g_integral_matches_closed_form = false;
  bool g_integral_is_minus_one = false;
};

// Checks (i) int f = 1, (ii) int f~ = 2, (iii) int f~ g dg = 1,
// (iv) spectrum distinct and inside the strip -1 < Re < 0.
// Failures are reported, never thrown.
AssumptionReport validate_assumption(const RealPolynomial& f);

}  // namespace recurflow
