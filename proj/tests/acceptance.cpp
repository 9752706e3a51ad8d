// Acceptance gate: twelve quantitative criteria for the quadratic-recurrence
// simulator, its linear/stability layer, and the verification suite.  Each
// criterion prints exactly one [PASS]/[FAIL] line; the process exits nonzero
// if any fail.  All tolerances are pinned here, in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "recurflow/kernel.hpp"
#include "recurflow/linear.hpp"
#include "recurflow/numerics.hpp"
#include "recurflow/rational.hpp"
#include "recurflow/recurrence.hpp"
#include "recurflow/verify.hpp"

using namespace recurflow;

namespace {

int g_failures = 0;

void report(int idx, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d (%s): %s\n", ok ? "PASS" : "FAIL", idx, title,
              detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  const RealPolynomial f({4.0, -10.0, 6.0});  // 6 g^2 - 10 g + 4, lowest first
  const RealPolynomial ft = symmetrize(f);
  const MonomialKernel kernel = to_monomials(kernel_G(ft));
  const double half_sqrt15 = std::sqrt(15.0) / 2.0;
  const double log_period = 4.0 * M_PI / std::sqrt(15.0);

  // --- 1. Characteristic spectrum: roots (-1 +- sqrt(15) i)/2, alpha_f = 3/2.
  {
    const auto t0 = std::chrono::steady_clock::now();
    const Spectrum s = characteristic_spectrum(ft);
    const double dt = seconds_since(t0);
    bool ok = s.roots.size() == 2 && s.distinct && s.in_strip;
    if (ok) {
      ok = std::abs(s.roots[0] - std::complex<double>(-0.5, half_sqrt15)) < 1e-12 &&
           std::abs(s.roots[1] - std::complex<double>(-0.5, -half_sqrt15)) < 1e-12 &&
           s.max_residual < 1e-12 && s.alpha_f == 1.5 && dt < 1.0;
    }
    report(1, "spectrum", ok,
           fmt("roots (%.15f, %+.15f i), residual %.2e, alpha_f %.1f, %.3f s",
               s.roots.empty() ? 0.0 : s.roots[0].real(),
               s.roots.empty() ? 0.0 : s.roots[0].imag(), s.max_residual, s.alpha_f,
               dt));
  }

  // --- 2. Decay of delta_p at P = 8192 in double-double; shared trace below.
  EngineConfig ecfg;
  ecfg.P = 8192;
  ecfg.precision = Precision::kDoubleDouble;
  const auto t_run = std::chrono::steady_clock::now();
  RecurrenceTrace trace = run_recurrence(f, ecfg);
  estimate_x_star(trace);
  DecayFit delta_fit;
  bool delta_fit_ok = true;
  std::string delta_err;
  try {
    delta_fit = fit_decay(trace.delta, 256, 8192, true);
  } catch (const Error& e) {
    delta_fit_ok = false;
    delta_err = e.what();
  }
  const double sim_seconds = seconds_since(t_run);
  {
    const bool ok = delta_fit_ok && std::fabs(delta_fit.exponent - (-1.5)) <= 0.1 &&
                    sim_seconds < 60.0;
    report(2, "main decay", ok,
           delta_fit_ok
               ? fmt("x* = %.12f, |delta_p| envelope exponent %.5f on [256, 8192] "
                     "(want -1.5 +- 0.1), %.2f s",
                     trace.x_star, delta_fit.exponent, sim_seconds)
               : "fit failed: " + delta_err);
  }

  // --- 3. xi decay and oscillation, after validating the fitter on a
  //        synthetic signal with the expected frequency.
  {
    std::vector<double> synth(4097, std::numeric_limits<double>::quiet_NaN());
    for (std::int64_t p = 256; p <= 4096; ++p)
      synth[static_cast<std::size_t>(p)] =
          std::pow(static_cast<double>(p), -0.5) *
          std::cos(half_sqrt15 * std::log(static_cast<double>(p)));
    bool ok = false;
    std::string detail;
    try {
      const DecayFit oracle = fit_decay(synth, 256, 4096, true);
      const bool oracle_ok = std::fabs(oracle.exponent - (-0.5)) <= 0.02 &&
                             std::fabs(oracle.log_period - log_period) <= 0.05;
      const DecayFit xfit = fit_decay(trace.xi, 256, 4096, true);
      ok = oracle_ok && std::fabs(xfit.exponent - (-0.5)) <= 0.1 &&
           std::fabs(xfit.log_period - log_period) <= 0.15;
      detail = fmt("oracle exponent %.4f period %.4f; xi exponent %.4f "
                   "period %.4f (want -0.5 +- 0.1, %.4f +- 0.15)",
                   oracle.exponent, oracle.log_period, xfit.exponent, xfit.log_period,
                   log_period);
    } catch (const Error& e) {
      detail = std::string("fit failed: ") + e.what();
    }
    report(3, "xi oscillation", ok, detail);
  }

  // --- 4. Exact decomposition identity through p = 1000.
  {
    const DecompositionScanner scan(trace, ft);
    double worst = 0.0;
    std::int64_t worst_p = 0;
    for (std::int64_t p = 3; p <= 1000; ++p) {
      const DecompositionTerms t = scan.terms(p);
      const double rel = t.identity_residual() / (1.0 + std::fabs(t.Q));
      if (rel > worst) {
        worst = rel;
        worst_p = p;
      }
    }
    report(4, "decomposition identity", worst < 1e-8,
           fmt("max relative residual %.3e at p = %lld (tolerance 1e-8)", worst,
               static_cast<long long>(worst_p)));
  }

  // --- 5. Exact-rational oracle through p = 12.
  {
    const std::vector<Rational> oracle = oracle_recurrence(f, 12);
    EngineConfig small;
    small.P = 12;
    const RecurrenceTrace st = run_recurrence(f, small);
    double worst = 0.0;
    for (std::int64_t p = 1; p <= 12; ++p) {
      const double cp = std::exp(st.log_c[static_cast<std::size_t>(p)]);
      const double want = oracle[static_cast<std::size_t>(p)].to_double();
      worst = std::max(worst, std::fabs(cp / want - 1.0));
    }
    const bool spot = oracle[2] == Rational(1, 4) && oracle[3] == Rational(1, 9);
    report(5, "rational oracle", worst < 1e-12 && spot,
           fmt("max relative error %.3e over p <= 12; c_2 = 1/4 and c_3 = 1/9: %s",
               worst, spot ? "yes" : "no"));
  }

  // --- 6. Homogeneous linear decay: sup |xi_p| sqrt(p) / |xi_2| plateaus.
  const auto scaled_running_max = [](const LinearTrace& t, std::int64_t upto) {
    double best = 0.0;
    for (std::int64_t p = 2; p <= upto; ++p)
      best = std::max(best, std::fabs(t.xi[static_cast<std::size_t>(p)]) *
                                std::sqrt(static_cast<double>(p)));
    return best;
  };
  {
    const LinearTrace lt = run_linear(kernel, 8.0, {}, 10000);
    const double m5 = scaled_running_max(lt, 5000) / 8.0;
    const double m10 = scaled_running_max(lt, 10000) / 8.0;
    const bool ok = std::isfinite(m10) && m10 > 0.0 && (m10 - m5) < 0.05 * m5;
    report(6, "homogeneous linear decay", ok,
           fmt("sup |xi_p| sqrt(p)/|xi_2| = %.6f at P = 5e3 vs %.6f at P = 1e4 "
               "(change %.2f%%)",
               m5, m10, m5 > 0.0 ? 100.0 * (m10 - m5) / m5 : 0.0));
  }

  // --- 7. Forced stability with h_p = p^{-3/4}.
  {
    std::vector<double> h(10001, 0.0);
    for (std::int64_t p = 3; p <= 10000; ++p)
      h[static_cast<std::size_t>(p)] = std::pow(static_cast<double>(p), -0.75);
    const LinearTrace lt = run_linear(kernel, 8.0, h, 10000);
    const double m5 = scaled_running_max(lt, 5000);
    const double m10 = scaled_running_max(lt, 10000);
    const bool ok = std::isfinite(m10) && m10 > 0.0 && (m10 - m5) < 0.05 * m5;
    report(7, "forced stability", ok,
           fmt("sup |xi_p| sqrt(p) = %.6f at P = 5e3 vs %.6f at P = 1e4 (change %.2f%%)",
               m5, m10, m5 > 0.0 ? 100.0 * (m10 - m5) / m5 : 0.0));
  }

  // --- 8. Matrix product norms for the shifted kernel plus the eigen check.
  {
    bool ok = false;
    std::string detail;
    try {
      const Spectrum s = sigma_of_kernel(kernel);
      const MonomialKernel shifted = shift_kernel(kernel, {s.sigma_G, 0.0});
      const ScanReport scan = product_norm_scan(shifted, {2, 10, 100}, 10000);
      bool plateaus = scan.entries.size() == 3;
      for (const ScanEntry& e : scan.entries) plateaus = plateaus && e.plateau_detected;
      const EigenReport eig = eigen_check(kernel);
      const double want[2][2] = {{-5.0, 6.0}, {-4.0, 4.0}};
      bool mt_ok = eig.m_tilde.n == 2;
      for (int i = 0; mt_ok && i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          mt_ok = mt_ok && eig.m_tilde(i, j) == std::complex<double>(want[i][j], 0.0);
      ok = plateaus && std::isfinite(scan.overall_sup) && mt_ok &&
           eig.max_mismatch < 1e-9;
      detail = fmt("overall sup %.4f, plateaus %s, m_tilde = [[-5,6],[-4,4]] %s, "
                   "eigen mismatch %.2e",
                   scan.overall_sup, plateaus ? "yes" : "no", mt_ok ? "yes" : "no",
                   eig.max_mismatch);
    } catch (const Error& e) {
      detail = std::string("scan failed: ") + e.what();
    }
    report(8, "matrix products", ok, detail);
  }

  // --- 9. Moment reconstruction residual on every linear run with P <= 2000.
  {
    std::vector<double> h(2001, 0.0);
    for (std::int64_t p = 3; p <= 2000; ++p)
      h[static_cast<std::size_t>(p)] = std::pow(static_cast<double>(p), -0.75);
    MonomialKernel single;
    single.terms.push_back({{1.0, 0.0}, {0.0, 0.0}});
    const double r1 = moment_transform(run_linear(kernel, 8.0, {}, 2000))
                          .reconstruction_residual;
    const double r2 = moment_transform(run_linear(kernel, 8.0, h, 2000))
                          .reconstruction_residual;
    const double r3 = moment_transform(run_linear(single, 1.0, {}, 2000))
                          .reconstruction_residual;
    const double worst = std::max({r1, r2, r3});
    report(9, "moment reconstruction", worst < 1e-12,
           fmt("residuals %.2e (homogeneous), %.2e (forced), %.2e (constant kernel); "
               "tolerance 1e-12",
               r1, r2, r3));
  }

  // --- 10. Explicit nonlinear bound with trace-fitted constants; C_{1/2} = pi.
  {
    const double c_half = singular_beta_integral(0.5);
    const double beta_oracle = std::tgamma(0.5) * std::tgamma(0.5) / std::tgamma(1.0);
    const bool c_ok =
        std::fabs(c_half - M_PI) < 1e-6 && std::fabs(c_half - beta_oracle) < 1e-6;
    bool bound_ok = true;
    double worst_ratio = 0.0;
    std::int64_t worst_p = 0;
    std::string detail;
    try {
      const AnsatzConstants c = fit_ansatz_constants(trace, 10, 0.2);
      for (std::int64_t p = 2 * c.N0; p <= 2000; ++p) {
        const NonlinearBoundReport r = nonlinear_bound_check(trace, ft, c, p);
        bound_ok = bound_ok && r.pass;
        if (r.ratio > worst_ratio) {
          worst_ratio = r.ratio;
          worst_p = p;
        }
      }
      detail = fmt("C_{1/2} = %.9f (pi to %.1e), max |N_p|/bound = %.4e at p = %lld",
                   c_half, std::fabs(c_half - M_PI), worst_ratio,
                   static_cast<long long>(worst_p));
    } catch (const Error& e) {
      bound_ok = false;
      detail = std::string("bound check failed: ") + e.what();
    }
    report(10, "nonlinear bound", c_ok && bound_ok, detail);
  }

  // --- 11. Base case: feasible (C4, epsilon = 0.2) with p0 of order 100.
  {
    AnsatzConstants c;
    c.epsilon = 0.2;
    const BaseCaseReport r = base_case_verifier(trace, kernel_G(ft), c);
    const bool ok = r.feasible && r.p0 <= 500;
    report(11, "base case", ok,
           fmt("C4 = %.6f, p0 = %lld (must be <= 500), horizon %lld", r.C4,
               static_cast<long long>(r.p0), static_cast<long long>(r.horizon)));
  }

  // --- 12. Elementary inequality suite at 1e5 samples per family.
  {
    const AppendixReport r = appendix_inequality_suite(100000, 20260815ULL);
    std::int64_t families = static_cast<std::int64_t>(r.results.size());
    for (const InequalityResult& q : r.results)
      if (!q.pass)
        std::printf("       witness (%s): %s\n", q.name.c_str(), q.witness.c_str());
    report(12, "inequality suite", r.all_pass && families == 12,
           fmt("%lld families x 1e5 admissible samples, all inequalities hold: %s",
               static_cast<long long>(families), r.all_pass ? "yes" : "no"));
  }

  if (g_failures == 0) {
    std::printf("all 12 acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
