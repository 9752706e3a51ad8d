#pragma once

// Simulation of the quadratic convolution recurrence
//   c_1 = 1,   c_p = (1/p) sum_{p1+p2=p} f(p1/p) c_{p1} c_{p2},
// with power-of-two renormalization so horizons of 10^4+ never overflow,
// plus the derived sequences a_p, xi_p, delta_p, the limit normalizer x*,
// and an exact rational oracle for small p.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "recurflow/numerics.hpp"
#include "recurflow/polynomial.hpp"
#include "recurflow/rational.hpp"

namespace recurflow {

enum class Precision { kDouble, kDoubleDouble };

struct EngineConfig {
  std::int64_t P = 1000;
  Precision precision = Precision::kDouble;
  bool parallel = false;
  std::int64_t renorm_threshold = 600;  // |mantissa exponent| that triggers rescale
  int threads = 0;                      // 0 = RECURFLOW_THREADS or hardware default
};

struct RecurrenceTrace {
  std::int64_t P = 0;
  Precision precision = Precision::kDouble;
  RealPolynomial f;

  // Renormalized coefficients: true log c_p = log|c[p]| + p * scale_offset.
  // The rescale factor is always a power of two, so pow2_offset is exact and
  // scale_offset = pow2_offset * ln 2 is its double view.
  std::vector<ScaledReal> c;  // index 0 unused
  std::int64_t pow2_offset = 0;
  double scale_offset = 0.0;

  std::vector<DoubleDouble> log_c_dd;  // true natural log of c_p (index 0 unused)
  std::vector<double> log_c;           // double view of log_c_dd
  std::vector<double> a;               // a_p = c_p^{-1/p}
  std::vector<double> xi;              // xi_p = p^3 (a_p/a_{p-1} - 1), NaN outside [2, xi_limit]
  std::int64_t xi_limit = 0;           // 4096 cap at double precision, P otherwise

  std::vector<double> delta;  // delta_p = (x*/a_p)^p - 1, NaN until x* estimation
  double x_star = 0.0;
  double err_bound = 0.0;
  bool x_star_estimated = false;

  bool assumption_warning = false;  // integral checks on f failed; run proceeded

  // log Lambda_p(x) = log c_p + p log x  (homogeneity: Lambda_p(x) = c_p x^p).
  double log_lambda(std::int64_t p, double x) const;
};

// Simulates the recurrence to cfg.P.  Throws SignDegeneracy at the first p
// with c_p <= 0 (the normalizer a_p = c_p^{-1/p} needs c_p > 0) and
// ConfigError for invalid cfg.  When the weight integral checks fail the run
// proceeds with assumption_warning set.
RecurrenceTrace run_recurrence(const RealPolynomial& f, const EngineConfig& cfg);

// Exact rational c_p for p <= P <= 16; result[p] = c_p, result[0] = 0.
// Double coefficients are binary rationals, so the conversion is exact.
std::vector<Rational> oracle_recurrence(const RealPolynomial& f, std::int64_t P);

// Extrapolates x* = lim a_p by adding the modeled tail of the log a increments
// (xi_q/q^3 with xi_q ~ Re(A q^sigma) fitted on the last resolved octave) to
// log a_P.  err_bound is the magnitude of that modeled tail in x units.
// Fills trace.delta with delta_p = exp(p (log x* - log a_p)) - 1.
// Throws InsufficientHorizon when P < 100.
std::pair<double, double> estimate_x_star(RecurrenceTrace& trace);

struct RResult {
  double R = 0.0;
  std::vector<double> Cp_seq;  // (Lambda_p(x)/R^p - 1) p^{alpha_f}; index 0 unused
};

// R = x/x*; Cp_seq is independent of x by homogeneity.  Throws ZeroInput when
// x = 0 and InsufficientData when x* has not been estimated.
RResult compute_R(const RecurrenceTrace& trace, double x);

// CSV with header p,log_c,a_p,xi_p,delta_p at 17 significant digits.
void export_trace_csv(const RecurrenceTrace& trace, std::ostream& out);

// Rebuilds the analyzable part of a trace (log_c, a, xi, delta) from CSV.
RecurrenceTrace import_trace_csv(std::istream& in);

}  // namespace recurflow
