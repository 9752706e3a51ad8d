#pragma once

// Quantitative checks of the analysis layer against an actual simulation
// trace: the exact four-term decomposition identity, the log p/p residual of
// the Q-difference estimate, the nonlinear-term bound with explicit
// constants, the working ansatz, the inductive base case, and decay fitting,
// plus a randomized suite for the elementary inequalities.

#include <cstdint>
#include <string>
#include <vector>

#include "recurflow/kernel.hpp"
#include "recurflow/polynomial.hpp"
#include "recurflow/recurrence.hpp"

namespace recurflow {

// ---------------------------------------------------------------------------
// Decomposition R1 + R2 - Q = N of the normalized recurrence at step p.
// ---------------------------------------------------------------------------

struct DecompositionTerms {
  std::int64_t p = 0;
  double R1 = 0.0;   // p (1 - (1/p) sum f(p1/p))
  double R2 = 0.0;   // p ((1 + xi_p/p^3)^{-p} - 1)
  double Q = 0.0;    // sum f~(p1/p) (prod_{p1<q<p} (1+xi_q/q^3)^{p1} - 1)
  double Npp = 0.0;  // quadratic cross term
  double identity_residual() const;  // |R1 + R2 - Q - Npp|
};

// Precomputes compensated prefix sums of log(1 + xi_q/q^3) so each terms(p)
// evaluation is O(p).  Every term is expressible through the symmetrized
// weight: pairing p1 with p-p1 turns f sums into (1/2) f~ sums.
class DecompositionScanner {
 public:
  DecompositionScanner(const RecurrenceTrace& trace, const RealPolynomial& f_tilde);

  DecompositionTerms terms(std::int64_t p) const;  // 3 <= p <= max_p()
  // Q_p alone (used by the Q-difference residual).
  double q_term(std::int64_t p) const;
  std::int64_t max_p() const { return max_p_; }

 private:
  std::vector<double> xi_;
  std::vector<double> prefix_;  // prefix_[q] = sum_{r=2}^{q} log(1 + xi_r/r^3)
  RealPolynomial ft_;
  std::int64_t max_p_ = 0;
};

DecompositionTerms decomposition_terms(const RecurrenceTrace& trace,
                                       const RealPolynomial& f, std::int64_t p);

// ---------------------------------------------------------------------------
// Linear-system forcing extracted from a trace.
// ---------------------------------------------------------------------------

// h_p = xi_p - (1/p) sum_{q=2}^{p-1} G(q/p) xi_q for 3 <= p <= resolved
// horizon; h[2] is set to xi_2 (the seed plays the role of initial forcing in
// the inductive base case) and h[0], h[1] are NaN.
std::vector<double> h_sequence(const RecurrenceTrace& trace, const RealPolynomial& G);

// |p(Q_p - Q_{p-1}) - (p/(p-1)) xi_{p-1} + (1/p) sum_{q=2}^{p-1} G(q/p) xi_q|
// with G derived from f~; the caller checks the C log p / p envelope.
double main_lemma_residual(const RecurrenceTrace& trace, const RealPolynomial& f_tilde,
                           std::int64_t p);
// Residuals for every p in [p_min, p_max] (shared scanner, one pass).
std::vector<double> main_lemma_residuals(const RecurrenceTrace& trace,
                                         const RealPolynomial& f_tilde,
                                         std::int64_t p_min, std::int64_t p_max);

// ---------------------------------------------------------------------------
// Working constants for the ansatz, the nonlinear bound, and the base case.
// ---------------------------------------------------------------------------

struct AnsatzConstants {
  // Ansatz items (1)-(3): |xi_q| <= A1 for N0 <= q < p, |xi_q| <= A3 for
  // q <= N0, and |prod_{p1<q<=N0} (1+xi_q/q^3)^{p1}| <= A2 for p1 < N0.
  double A1 = 0.0, A2 = 0.0, A3 = 0.0;
  std::int64_t N0 = 3;
  // Nonlinear-term lemma constants: |prod_{p1<q<N0}(...)^{p1}| <= C1 for
  // p1 < N0 and |xi_q| <= C2 q^{-sigma} past N0 (sigma = -sigma_G > 0).
  double C1 = 0.0, C2 = 0.0;
  // Inductive envelope |h_r| <= C4 r^{sigma_G - epsilon} beyond p0.
  double C4 = 0.0;
  double epsilon = 0.2;
  std::int64_t p0 = 100;
};

// Enforces N0 >= max(3, A1), 0 < epsilon < (1/2) min(1 + sigma_G, -sigma_G),
// and positivity; throws ConfigError.
void validate_ansatz_constants(const AnsatzConstants& c, double sigma_G);

// Measures the smallest constants the trace supports (given N0 and epsilon);
// C4/p0 are filled from the base-case scan against kernel_G(symmetrize(f)).
AnsatzConstants fit_ansatz_constants(const RecurrenceTrace& trace, std::int64_t N0,
                                     double epsilon);

struct AnsatzReport {
  std::int64_t p = 0;
  std::int64_t N0 = 3;
  bool item1_pass = false, item2_pass = false, item3_pass = false;
  double item1_measured = 0.0, item2_measured = 0.0, item3_measured = 0.0;
  double feasible_A1 = 0.0, feasible_A2 = 0.0, feasible_A3 = 0.0;
  bool all_pass = false;
};

// Checks ansatz items (1)-(3) at step p against c and reports the smallest
// feasible (A1, A2, A3) for this trace.  xi_1 does not exist, so item (2)
// starts at q = 2.
AnsatzReport ansatz_check(const RecurrenceTrace& trace, const AnsatzConstants& c,
                          std::int64_t p);

struct NonlinearBoundReport {
  std::int64_t p = 0;
  double actual = 0.0;  // |N_p| from the decomposition
  double bound = 0.0;   // ||f~||_inf ((1+C1+C2) 2 N0^2 C2/(p-N0)^{2+s} + 4 C2^2 C_s/p^{1+2s})
  double ratio = 0.0;
  double sigma = 0.0;    // s = -sigma_G in (0,1)
  double c_sigma = 0.0;  // int_0^1 g^{-s} (1-g)^{-s} dg
  bool pass = false;
};

// Verifies the hypotheses (product bound C1 below N0, decay bound C2 q^{-s}
// past N0, N0 >= max(C2^{1/(1+s)}, (4 C2)^{1/(3+s)}), p >= 2 N0), throwing
// HypothesisViolated naming the first failing item, then compares |N_p| with
// the explicit bound.
NonlinearBoundReport nonlinear_bound_check(const RecurrenceTrace& trace,
                                           const RealPolynomial& f_tilde,
                                           const AnsatzConstants& c, std::int64_t p);

struct BaseCaseReport {
  double sigma_G = 0.0;
  double epsilon = 0.0;
  double C4 = 0.0;        // smallest C4 with |h_r| <= C4 r^{sigma_G-eps} on [2, horizon]
  std::int64_t p0 = 0;    // smallest p0 with |h_r| <= (C4/2) r^{sigma_G-eps} for r > p0
  std::int64_t worst_r = 0;
  std::int64_t horizon = 0;
  bool feasible = false;
};

// The factor-2 margin in p0 mirrors the induction's need for slack between
// the measured envelope and the assumed one.
BaseCaseReport base_case_verifier(const RecurrenceTrace& trace, const RealPolynomial& G,
                                  const AnsatzConstants& c);

// hat xi_p = -p^2 ((1 + xi_p/p^3)^{-p} - 1); close to xi_p up to O(xi^2/p^2).
double hat_xi(const RecurrenceTrace& trace, std::int64_t p);

struct HatXiReport {
  double max_ratio = 0.0;  // sup |hat xi_p - xi_p| p^2 / xi_p^2
  std::int64_t worst_p = 0;
  bool pass = false;  // max_ratio <= 5/4
};

HatXiReport hat_xi_companion_check(const RecurrenceTrace& trace);

// ---------------------------------------------------------------------------
// Decay fitting.
// ---------------------------------------------------------------------------

struct DecayFit {
  double exponent = 0.0;
  double amplitude = 0.0;
  double log_period = 0.0;  // NaN when no oscillation detected
  double residual = 0.0;    // RMS of the fit in log space
  std::int64_t p_min = 0, p_max = 0;
};

// seq is indexed by p (seq[p]); entries outside [p_min, p_max] are ignored,
// NaNs inside are skipped.  Oscillatory fits estimate the log-period from
// zero-crossing spacings and fit the quadrature envelope
// sqrt(seq(t)^2 + e^{-2 s tau} seq(t e^{tau})^2), tau = quarter period, which
// is phase-insensitive; plain fits regress log|seq| on log p directly.
// Throws InsufficientData when fewer than 8 usable envelope points exist.
DecayFit fit_decay(const std::vector<double>& seq, std::int64_t p_min,
                   std::int64_t p_max, bool oscillatory);

// ---------------------------------------------------------------------------
// Randomized checks of the elementary inequalities.
// ---------------------------------------------------------------------------

struct InequalityResult {
  std::string name;
  std::int64_t samples = 0;
  std::int64_t failures = 0;
  double worst_margin = 0.0;  // most negative (bound - |lhs|) seen, 0 if none
  std::string witness;        // inputs of the first failure, empty if none
  bool pass = false;
};

struct AppendixReport {
  std::vector<InequalityResult> results;
  bool all_pass = false;
};

// Six scalar inequalities, the p^3((1+x/p^2)^{-1/p}-1)+x bound, and the
// product-deviation lemmas on randomized admissible sequences.
AppendixReport appendix_inequality_suite(std::int64_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Named-check suite over a trace.
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured_constant = 0.0;
  double threshold = 0.0;
  std::int64_t worst_p = 0;
  std::string details;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool all_pass = false;
};

// Known names: identity, main_lemma, h_order, nonlinear_bound, ansatz,
// base_case, hat_xi, appendix, xi_decay, delta_decay.  Empty selection runs
// all; unknown names throw ConfigError.
VerificationReport run_verification_suite(const RecurrenceTrace& trace,
                                          const RealPolynomial& f,
                                          const std::vector<std::string>& selected = {});

const std::vector<std::string>& known_check_names();

}  // namespace recurflow
