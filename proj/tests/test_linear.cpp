// Tests for the linearized recursion: direct simulation, moment transform,
// transition matrices, product norm scans, and the eigenvalue cross-check.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "recurflow/errors.hpp"
#include "recurflow/kernel.hpp"
#include "recurflow/linear.hpp"

using namespace recurflow;

namespace {

const RealPolynomial kF({4.0, -10.0, 6.0});

MonomialKernel reference_kernel() { return to_monomials(kernel_G(symmetrize(kF))); }

MonomialKernel single_term(double coeff, double alpha) {
  MonomialKernel k;
  k.terms.push_back({Complex(coeff, 0.0), Complex(alpha, 0.0)});
  return k;
}

}  // namespace

TEST_CASE("zero seed and zero forcing stay identically zero") {
  const LinearTrace t = run_linear(reference_kernel(), 0.0, {}, 200);
  for (std::int64_t p = 2; p <= 200; ++p) CHECK(t.xi[static_cast<std::size_t>(p)] == 0.0);
}

TEST_CASE("the recursion is exactly linear in the seed") {
  const MonomialKernel k = reference_kernel();
  const LinearTrace a = run_linear(k, 8.0, {}, 500);
  const LinearTrace b = run_linear(k, 16.0, {}, 500);
  // Doubling the seed doubles every intermediate exactly (scaling by 2 is
  // exact in binary floating point), so the comparison is bitwise.
  for (std::int64_t p = 2; p <= 500; ++p)
    CHECK(b.xi[static_cast<std::size_t>(p)] == 2.0 * a.xi[static_cast<std::size_t>(p)]);
}

TEST_CASE("constant kernel with unit weight gives the constant solution 1/3") {
  // G == 1: xi_p = (1/p) sum_{q=2}^{p-1} xi_q has the fixed point xi == 1/3
  // once xi_2 = 1 (the characteristic root is 0).
  const LinearTrace t = run_linear(single_term(1.0, 0.0), 1.0, {}, 400);
  for (std::int64_t p = 3; p <= 400; ++p)
    CHECK(t.xi[static_cast<std::size_t>(p)] ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  // Moments: B_p = sum xi_q = (p+1)/3 and B~_p = (p+1)/(3p) exactly.
  const MomentState m = moment_transform(t);
  REQUIRE(m.N == 1);
  for (std::int64_t p = 2; p <= 400; p += 37)
    CHECK(m.B[0][static_cast<std::size_t>(p)].real() ==
          doctest::Approx((static_cast<double>(p) + 1.0) / 3.0).epsilon(1e-13));
  CHECK(m.sup_B_tilde_norm == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(m.reconstruction_residual < 1e-13);
}

TEST_CASE("scalar transition products telescope") {
  // C = 1, alpha = 0: M_p = (1-1/p)(1+1/p) = 1 - 1/p^2, and the product from
  // q0 to p is (q0-1)(p+1)/(q0 p), decreasing in p; the sup is the first
  // factor 1 - 1/q0^2.
  const MonomialKernel up = single_term(1.0, 0.0);
  CHECK(transition_matrix(up, 7).entries(0, 0).real() ==
        doctest::Approx(1.0 - 1.0 / 49.0).epsilon(1e-15));
  const ScanReport r = product_norm_scan(up, {2, 5, 10}, 300);
  REQUIRE(r.entries.size() == 3);
  for (const ScanEntry& e : r.entries) {
    const double q0 = static_cast<double>(e.q0);
    CHECK(e.sup_norm == doctest::Approx(1.0 - 1.0 / (q0 * q0)).epsilon(1e-12));
    CHECK(e.plateau_detected);
  }
  CHECK(r.overall_sup == doctest::Approx(1.0 - 1.0 / 100.0).epsilon(1e-12));

  // C = -1, alpha = 0: M_p = (1-1/p)^2, product ((q0-1)/p)^2, sup at p = q0.
  const ScanReport r2 = product_norm_scan(single_term(-1.0, 0.0), {4}, 300);
  CHECK(r2.entries[0].sup_norm == doctest::Approx(9.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("transition matrix entries at p = 2 and the first-order limit") {
  const MonomialKernel k = reference_kernel();
  REQUIRE(k.terms.size() == 2);
  const ComplexMatrix m2 = transition_matrix(k, 2).entries;
  CHECK(m2(0, 0).real() == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(m2(0, 1).real() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m2(1, 0).real() == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(m2(1, 1).real() == doctest::Approx(1.0).epsilon(1e-15));

  // p (M_p - I) converges to the first-order matrix [[-5, 6], [-4, 4]].
  const double expected[2][2] = {{-5.0, 6.0}, {-4.0, 4.0}};
  const std::int64_t p = 1000000;
  const ComplexMatrix mp = transition_matrix(k, p).entries;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Complex v = mp(i, j);
      if (i == j) v -= 1.0;
      v *= static_cast<double>(p);
      CHECK(v.real() == doctest::Approx(expected[i][j]).epsilon(3e-5));
      CHECK(v.imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    }
}

TEST_CASE("moment reconstruction matches the direct recursion") {
  const MonomialKernel k = reference_kernel();
  const LinearTrace t = run_linear(k, 8.0, {}, 2000);
  CHECK(linear_residual(t) < 1e-12);

  const MomentState m = moment_transform(t);
  CHECK(m.reconstruction_residual < 1e-12);
  CHECK(m.sup_B_tilde_norm > 0.0);
  CHECK(m.sup_B_tilde_norm < 100.0);

  const std::vector<double> xm = linear_via_moments(k, 8.0, {}, 2000);
  for (std::int64_t p = 2; p <= 2000; ++p)
    CHECK(std::fabs(xm[static_cast<std::size_t>(p)] -
                    t.xi[static_cast<std::size_t>(p)]) < 1e-12);
}

TEST_CASE("sqrt(p)-scaled amplitudes plateau for the reference kernel") {
  const MonomialKernel k = reference_kernel();
  const auto scaled_sup = [&](const LinearTrace& t) {
    double best = 0.0;
    for (std::int64_t p = 16; p <= t.P; ++p)
      best = std::max(best, std::fabs(t.xi[static_cast<std::size_t>(p)]) *
                                std::sqrt(static_cast<double>(p)));
    return best;
  };
  const double m1 = scaled_sup(run_linear(k, 8.0, {}, 4000));
  const double m2 = scaled_sup(run_linear(k, 8.0, {}, 8000));
  CHECK(m2 > 0.0);
  CHECK(m2 <= 1.05 * m1);

  // Forcing h_p = p^{-3/4} decays slower than the homogeneous modes yet the
  // scaled amplitude still saturates.
  std::vector<double> h(8001, 0.0);
  for (std::int64_t p = 3; p <= 8000; ++p)
    h[static_cast<std::size_t>(p)] = std::pow(static_cast<double>(p), -0.75);
  const double f1 = scaled_sup(run_linear(k, 8.0, h, 4000));
  const double f2 = scaled_sup(run_linear(k, 8.0, h, 8000));
  CHECK(f2 > 0.0);
  CHECK(f2 <= 1.05 * f1);
}

TEST_CASE("eigenvalue cross-check on the reference kernel") {
  const EigenReport r = eigen_check(reference_kernel());
  REQUIRE(r.m_tilde.n == 2);
  CHECK(r.m_tilde(0, 0) == Complex(-5.0, 0.0));
  CHECK(r.m_tilde(0, 1) == Complex(6.0, 0.0));
  CHECK(r.m_tilde(1, 0) == Complex(-4.0, 0.0));
  CHECK(r.m_tilde(1, 1) == Complex(4.0, 0.0));
  CHECK(r.max_mismatch < 1e-12);
  REQUIRE(r.expected_roots.size() == 2);
  CHECK(r.expected_roots[0].real() == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(std::fabs(r.expected_roots[0].imag()) ==
        doctest::Approx(std::sqrt(15.0) / 2.0).epsilon(1e-14));
  CHECK(r.s_condition > 1.0);
  CHECK(r.s_condition < 100.0);
}

TEST_CASE("eigenvalue cross-check on a non-reference kernel") {
  // f = 1 + gamma^2 gives the kernel -2/3 + gamma.
  const MonomialKernel k =
      to_monomials(kernel_G(symmetrize(RealPolynomial({1.0, 0.0, 1.0}))));
  const EigenReport r = eigen_check(k);
  CHECK(r.max_mismatch < 1e-9);
  CHECK(r.eigenvalues.size() == r.expected_roots.size());
}

TEST_CASE("diagonalized steps are contractions for the reference kernel") {
  const MonomialKernel k = reference_kernel();
  for (std::int64_t p : {8, 16, 32, 64, 128, 256, 512, 1024}) {
    const double n = diagonalized_step_norm(k, p);
    CHECK(n < 1.0);
    CHECK(n > 0.9);
  }
}

TEST_CASE("product scan over the reference kernel, shifted to the edge") {
  const MonomialKernel k = reference_kernel();
  const Spectrum s = sigma_of_kernel(k);
  const MonomialKernel shifted = shift_kernel(k, Complex(s.sigma_G, 0.0));
  const ScanReport r = product_norm_scan(shifted, {2, 10}, 4000);
  REQUIRE(r.entries.size() == 2);
  for (const ScanEntry& e : r.entries) {
    CHECK(e.sup_norm > 1.0);
    CHECK(e.sup_norm < 10.0);
    CHECK(e.plateau_detected);
    REQUIRE(!e.profile.empty());
    CHECK(e.profile.front().first == e.q0);
    CHECK(e.profile.back().second == doctest::Approx(e.sup_norm));
  }
  CHECK(r.overall_sup == doctest::Approx(4.343545).epsilon(0.02));
}

TEST_CASE("product scan rejects kernels with expanding modes") {
  // Shifting by -1 moves the roots to Re = +1/2 > 0.
  const MonomialKernel grower = shift_kernel(reference_kernel(), Complex(-1.0, 0.0));
  CHECK_THROWS_AS(product_norm_scan(grower, {2}, 50), HypothesisViolated);
}

TEST_CASE("product scan reports blowup past the norm cap") {
  try {
    product_norm_scan(reference_kernel(), {2}, 100, 1.0);
    FAIL("expected NormBlowup");
  } catch (const NormBlowup& e) {
    CHECK(e.norm_value > 1.0);
    CHECK(e.p >= 2);
  }
}

TEST_CASE("input validation") {
  const MonomialKernel k = reference_kernel();
  CHECK_THROWS_AS(run_linear(k, 8.0, {}, 2), ConfigError);
  CHECK_THROWS_AS(run_linear(k, 8.0, std::vector<double>(5, 0.0), 10), ConfigError);
  MonomialKernel complex_kernel;
  complex_kernel.terms.push_back({Complex(1.0, 0.5), Complex(0.0, 0.0)});
  CHECK_THROWS_AS(run_linear(complex_kernel, 8.0, {}, 10), ConfigError);
  CHECK_THROWS_AS(transition_matrix(k, 1), ConfigError);
  CHECK_THROWS_AS(product_norm_scan(k, {1}, 50), ConfigError);
}
