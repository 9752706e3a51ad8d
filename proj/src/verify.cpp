#include "recurflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "recurflow/errors.hpp"
#include "recurflow/linear.hpp"
#include "recurflow/numerics.hpp"

namespace recurflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double poly_eval(const RealPolynomial& f, double x) { return f.eval(x); }

}  // namespace

// ---------------------------------------------------------------------------
// Decomposition terms.
// ---------------------------------------------------------------------------

double DecompositionTerms::identity_residual() const {
  return std::fabs(R1 + R2 - Q - Npp);
}

DecompositionScanner::DecompositionScanner(const RecurrenceTrace& trace,
                                           const RealPolynomial& f_tilde)
    : ft_(f_tilde) {
  max_p_ = trace.xi_limit;
  xi_.assign(static_cast<std::size_t>(max_p_) + 1, kNaN);
  prefix_.assign(static_cast<std::size_t>(max_p_) + 1, 0.0);
  CompensatedAccumulator acc;
  for (std::int64_t q = 2; q <= max_p_; ++q) {
    const double x = trace.xi[static_cast<std::size_t>(q)];
    xi_[static_cast<std::size_t>(q)] = x;
    const double q3 = static_cast<double>(q) * static_cast<double>(q) * static_cast<double>(q);
    acc.add(std::log1p(x / q3));
    prefix_[static_cast<std::size_t>(q)] = acc.value();
  }
}

DecompositionTerms DecompositionScanner::terms(std::int64_t p) const {
  if (p < 3 || p > max_p_)
    throw ConfigError("decomposition terms need 3 <= p <= resolved horizon");
  DecompositionTerms t;
  t.p = p;
  const double pd = static_cast<double>(p);

  // W(p1) - 1 with W(p1) = prod_{p1<q<p} (1 + xi_q/q^3)^{p1}.
  auto wm1 = [&](std::int64_t p1) {
    return std::expm1(static_cast<double>(p1) *
                      (prefix_[static_cast<std::size_t>(p - 1)] -
                       prefix_[static_cast<std::size_t>(p1)]));
  };

  // Pairing p1 <-> p-p1 expresses the f sums through f~ = f + f(1-.):
  // sum f(p1/p) X(p1) X(p-p1) = (1/2) sum f~(p1/p) X(p1) X(p-p1) for any X.
  CompensatedAccumulator sum_ft, sum_q, sum_n;
  for (std::int64_t p1 = 1; p1 <= p - 1; ++p1) {
    const double ft = poly_eval(ft_, static_cast<double>(p1) / pd);
    sum_ft.add(ft);
    const double w1 = wm1(p1);
    if (p1 <= p - 2) sum_q.add(ft * w1);
    sum_n.add(ft * w1 * wm1(p - p1));
  }
  t.R1 = pd - 0.5 * sum_ft.value();
  const double p3 = pd * pd * pd;
  t.R2 = pd * std::expm1(-pd * std::log1p(xi_[static_cast<std::size_t>(p)] / p3));
  t.Q = sum_q.value();
  t.Npp = 0.5 * sum_n.value();
  return t;
}

double DecompositionScanner::q_term(std::int64_t p) const {
  if (p < 3 || p > max_p_)
    throw ConfigError("Q_p needs 3 <= p <= resolved horizon");
  const double pd = static_cast<double>(p);
  CompensatedAccumulator sum_q;
  for (std::int64_t p1 = 1; p1 <= p - 2; ++p1) {
    const double ft = poly_eval(ft_, static_cast<double>(p1) / pd);
    sum_q.add(ft * std::expm1(static_cast<double>(p1) *
                              (prefix_[static_cast<std::size_t>(p - 1)] -
                               prefix_[static_cast<std::size_t>(p1)])));
  }
  return sum_q.value();
}

DecompositionTerms decomposition_terms(const RecurrenceTrace& trace,
                                       const RealPolynomial& f, std::int64_t p) {
  return DecompositionScanner(trace, symmetrize(f)).terms(p);
}

// ---------------------------------------------------------------------------
// Forcing and the Q-difference residual.
// ---------------------------------------------------------------------------

std::vector<double> h_sequence(const RecurrenceTrace& trace, const RealPolynomial& G) {
  const std::int64_t limit = trace.xi_limit;
  std::vector<double> h(static_cast<std::size_t>(limit) + 1, kNaN);
  if (limit >= 2) h[2] = trace.xi[2];
  for (std::int64_t p = 3; p <= limit; ++p) {
    const double pd = static_cast<double>(p);
    CompensatedAccumulator s;
    for (std::int64_t q = 2; q < p; ++q)
      s.add(poly_eval(G, static_cast<double>(q) / pd) *
            trace.xi[static_cast<std::size_t>(q)]);
    h[static_cast<std::size_t>(p)] = trace.xi[static_cast<std::size_t>(p)] - s.value() / pd;
  }
  return h;
}

namespace {

double main_lemma_residual_impl(const DecompositionScanner& scan,
                                const RecurrenceTrace& trace, const RealPolynomial& G,
                                std::int64_t p) {
  const double pd = static_cast<double>(p);
  const double dq = pd * (scan.q_term(p) - scan.q_term(p - 1));
  CompensatedAccumulator s;
  for (std::int64_t q = 2; q <= p - 1; ++q)
    s.add(poly_eval(G, static_cast<double>(q) / pd) *
          trace.xi[static_cast<std::size_t>(q)]);
  return std::fabs(dq - pd / (pd - 1.0) * trace.xi[static_cast<std::size_t>(p - 1)] +
                   s.value() / pd);
}

}  // namespace

double main_lemma_residual(const RecurrenceTrace& trace, const RealPolynomial& f_tilde,
                           std::int64_t p) {
  if (p < 4) throw ConfigError("main lemma residual needs p >= 4");
  DecompositionScanner scan(trace, f_tilde);
  return main_lemma_residual_impl(scan, trace, kernel_G(f_tilde), p);
}

std::vector<double> main_lemma_residuals(const RecurrenceTrace& trace,
                                         const RealPolynomial& f_tilde,
                                         std::int64_t p_min, std::int64_t p_max) {
  if (p_min < 4) throw ConfigError("main lemma residuals need p_min >= 4");
  DecompositionScanner scan(trace, f_tilde);
  const RealPolynomial G = kernel_G(f_tilde);
  std::vector<double> out;
  for (std::int64_t p = p_min; p <= p_max; ++p)
    out.push_back(main_lemma_residual_impl(scan, trace, G, p));
  return out;
}

// ---------------------------------------------------------------------------
// Ansatz constants.
// ---------------------------------------------------------------------------

void validate_ansatz_constants(const AnsatzConstants& c, double sigma_G) {
  if (!(c.A1 > 0.0 && c.A2 > 0.0 && c.A3 > 0.0))
    throw ConfigError("ansatz constants A1, A2, A3 must be positive");
  if (c.N0 < 3 || static_cast<double>(c.N0) < c.A1)
    throw ConfigError("ansatz requires N0 >= max(3, A1)");
  const double cap = 0.5 * std::min(1.0 + sigma_G, -sigma_G);
  if (!(c.epsilon > 0.0 && c.epsilon < cap))
    throw ConfigError("ansatz requires 0 < epsilon < (1/2) min(1+sigma_G, -sigma_G)");
}

namespace {

// |prod_{p1<q<=q_hi} (1 + xi_q/q^3)^{p1}|, directly (q_hi is small).
double small_product(const std::vector<double>& xi, std::int64_t p1, std::int64_t q_hi) {
  double logsum = 0.0;
  for (std::int64_t q = p1 + 1; q <= q_hi; ++q) {
    const double q3 = static_cast<double>(q) * static_cast<double>(q) * static_cast<double>(q);
    logsum += std::log1p(xi[static_cast<std::size_t>(q)] / q3);
  }
  return std::exp(static_cast<double>(p1) * logsum);
}

}  // namespace

AnsatzConstants fit_ansatz_constants(const RecurrenceTrace& trace, std::int64_t N0,
                                     double epsilon) {
  const std::int64_t limit = trace.xi_limit;
  if (N0 < 3 || limit <= N0 + 2)
    throw ConfigError("fit_ansatz_constants needs 3 <= N0 << resolved horizon");

  AnsatzConstants c;
  c.N0 = N0;
  c.epsilon = epsilon;
  for (std::int64_t q = N0; q <= limit; ++q)
    c.A1 = std::max(c.A1, std::fabs(trace.xi[static_cast<std::size_t>(q)]));
  for (std::int64_t q = 2; q <= N0; ++q)
    c.A3 = std::max(c.A3, std::fabs(trace.xi[static_cast<std::size_t>(q)]));
  for (std::int64_t p1 = 1; p1 < N0; ++p1) {
    c.A2 = std::max(c.A2, std::fabs(small_product(trace.xi, p1, N0)));
    c.C1 = std::max(c.C1, std::fabs(small_product(trace.xi, p1, N0 - 1)));
  }

  const Spectrum spec = characteristic_spectrum(symmetrize(trace.f));
  const double sigma = -spec.sigma_G;
  for (std::int64_t q = N0 + 1; q <= limit; ++q)
    c.C2 = std::max(c.C2, std::fabs(trace.xi[static_cast<std::size_t>(q)]) *
                              std::pow(static_cast<double>(q), sigma));

  const BaseCaseReport base =
      base_case_verifier(trace, kernel_G(symmetrize(trace.f)), c);
  c.C4 = base.C4;
  c.p0 = base.p0;
  return c;
}

AnsatzReport ansatz_check(const RecurrenceTrace& trace, const AnsatzConstants& c,
                          std::int64_t p) {
  if (p <= c.N0) throw ConfigError("ansatz_check needs p > N0");
  const std::int64_t hi = std::min(p - 1, trace.xi_limit);

  AnsatzReport r;
  r.p = p;
  r.N0 = c.N0;
  for (std::int64_t q = c.N0; q <= hi; ++q)
    r.item1_measured =
        std::max(r.item1_measured, std::fabs(trace.xi[static_cast<std::size_t>(q)]));
  for (std::int64_t q = 2; q <= std::min(c.N0, trace.xi_limit); ++q)
    r.item2_measured =
        std::max(r.item2_measured, std::fabs(trace.xi[static_cast<std::size_t>(q)]));
  for (std::int64_t p1 = 1; p1 < c.N0; ++p1)
    r.item3_measured =
        std::max(r.item3_measured, std::fabs(small_product(trace.xi, p1, c.N0)));

  r.item1_pass = r.item1_measured <= c.A1;
  r.item2_pass = r.item2_measured <= c.A3;
  r.item3_pass = r.item3_measured <= c.A2;
  r.feasible_A1 = r.item1_measured;
  r.feasible_A3 = r.item2_measured;
  r.feasible_A2 = r.item3_measured;
  r.all_pass = r.item1_pass && r.item2_pass && r.item3_pass;
  return r;
}

// ---------------------------------------------------------------------------
// Nonlinear-term bound.
// ---------------------------------------------------------------------------

namespace {

double nonlinear_bound_value(const AnsatzConstants& c, double sigma, double c_sigma,
                             double ft_sup, std::int64_t p) {
  const double pd = static_cast<double>(p);
  const double n0 = static_cast<double>(c.N0);
  return ft_sup * ((1.0 + c.C1 + c.C2) * 2.0 * n0 * n0 * c.C2 /
                       std::pow(pd - n0, 2.0 + sigma) +
                   4.0 * c.C2 * c.C2 * c_sigma / std::pow(pd, 1.0 + 2.0 * sigma));
}

void check_nonlinear_hypotheses(const RecurrenceTrace& trace, const AnsatzConstants& c,
                                double sigma, std::int64_t p) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw HypothesisViolated("nonlinear bound needs 0 < sigma < 1, got " +
                             std::to_string(sigma));
  if (p < 2 * c.N0)
    throw HypothesisViolated("nonlinear bound needs p >= 2 N0");
  const double n0_floor = std::max(std::pow(c.C2, 1.0 / (1.0 + sigma)),
                                   std::pow(4.0 * c.C2, 1.0 / (3.0 + sigma)));
  if (static_cast<double>(c.N0) < n0_floor)
    throw HypothesisViolated("nonlinear bound needs N0 >= max(C2^{1/(1+s)}, (4C2)^{1/(3+s)})");
  for (std::int64_t p1 = 1; p1 < c.N0; ++p1)
    if (std::fabs(small_product(trace.xi, p1, c.N0 - 1)) > c.C1)
      throw HypothesisViolated("product hypothesis |prod| <= C1 fails at p1 = " +
                               std::to_string(p1));
  for (std::int64_t q = c.N0 + 1; q < std::min(p, trace.xi_limit + 1); ++q)
    if (std::fabs(trace.xi[static_cast<std::size_t>(q)]) >
        c.C2 * std::pow(static_cast<double>(q), -sigma))
      throw HypothesisViolated("decay hypothesis |xi_q| <= C2 q^{-sigma} fails at q = " +
                               std::to_string(q));
}

}  // namespace

NonlinearBoundReport nonlinear_bound_check(const RecurrenceTrace& trace,
                                           const RealPolynomial& f_tilde,
                                           const AnsatzConstants& c, std::int64_t p) {
  const Spectrum spec = characteristic_spectrum(f_tilde);
  const double sigma = -spec.sigma_G;
  check_nonlinear_hypotheses(trace, c, sigma, p);

  DecompositionScanner scan(trace, f_tilde);
  NonlinearBoundReport r;
  r.p = p;
  r.sigma = sigma;
  r.c_sigma = singular_beta_integral(sigma);
  r.actual = std::fabs(scan.terms(p).Npp);
  r.bound = nonlinear_bound_value(c, sigma, r.c_sigma, f_tilde.sup_norm01(), p);
  r.ratio = r.actual / r.bound;
  r.pass = r.actual <= r.bound;
  return r;
}

// ---------------------------------------------------------------------------
// Inductive base case.
// ---------------------------------------------------------------------------

BaseCaseReport base_case_verifier(const RecurrenceTrace& trace, const RealPolynomial& G,
                                  const AnsatzConstants& c) {
  if (trace.xi_limit < 2 * c.p0)
    throw InsufficientHorizon("base_case_verifier needs horizon >= 2 p0");

  BaseCaseReport r;
  r.epsilon = c.epsilon;
  r.horizon = trace.xi_limit;
  r.sigma_G = sigma_of_kernel(to_monomials(G)).sigma_G;

  const std::vector<double> h = h_sequence(trace, G);
  const double rate = r.sigma_G - c.epsilon;
  r.feasible = true;
  for (std::int64_t q = 2; q <= r.horizon; ++q) {
    const double hv = h[static_cast<std::size_t>(q)];
    if (!std::isfinite(hv)) {
      r.feasible = false;
      continue;
    }
    const double need = std::fabs(hv) * std::pow(static_cast<double>(q), -rate);
    if (need > r.C4) {
      r.C4 = need;
      r.worst_r = q;
    }
  }
  r.p0 = 2;
  for (std::int64_t q = r.horizon; q >= 2; --q) {
    const double hv = h[static_cast<std::size_t>(q)];
    if (!std::isfinite(hv)) continue;
    if (std::fabs(hv) > 0.5 * r.C4 * std::pow(static_cast<double>(q), rate)) {
      r.p0 = q;
      break;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// hat xi.
// ---------------------------------------------------------------------------

double hat_xi(const RecurrenceTrace& trace, std::int64_t p) {
  if (p < 2 || p > trace.xi_limit)
    throw ConfigError("hat_xi needs 2 <= p <= resolved horizon");
  const double pd = static_cast<double>(p);
  const double p3 = pd * pd * pd;
  return -pd * pd *
         std::expm1(-pd * std::log1p(trace.xi[static_cast<std::size_t>(p)] / p3));
}

HatXiReport hat_xi_companion_check(const RecurrenceTrace& trace) {
  HatXiReport r;
  for (std::int64_t p = 2; p <= trace.xi_limit; ++p) {
    const double x = trace.xi[static_cast<std::size_t>(p)];
    if (!std::isfinite(x) || x == 0.0) continue;
    const double pd = static_cast<double>(p);
    const double ratio = std::fabs(hat_xi(trace, p) - x) * pd * pd / (x * x);
    if (ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.worst_p = p;
    }
  }
  r.pass = r.max_ratio <= 1.25;
  return r;
}

// ---------------------------------------------------------------------------
// Decay fitting.
// ---------------------------------------------------------------------------

namespace {

struct LinFit {
  double slope = 0.0, intercept = 0.0, rms = 0.0;
  std::size_t n = 0;
};

LinFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LinFit f;
  f.n = x.size();
  if (f.n < 2) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < f.n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double n = static_cast<double>(f.n);
  const double det = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < f.n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss += e * e;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& seq, std::int64_t p_min,
                   std::int64_t p_max, bool oscillatory) {
  std::vector<double> ts, vs;  // usable points: t = log p, v = seq[p]
  const std::int64_t hi =
      std::min<std::int64_t>(p_max, static_cast<std::int64_t>(seq.size()) - 1);
  for (std::int64_t p = std::max<std::int64_t>(p_min, 1); p <= hi; ++p) {
    const double v = seq[static_cast<std::size_t>(p)];
    if (!std::isfinite(v)) continue;
    ts.push_back(std::log(static_cast<double>(p)));
    vs.push_back(v);
  }

  DecayFit fit;
  fit.p_min = p_min;
  fit.p_max = p_max;
  fit.log_period = kNaN;

  auto direct_fit = [&]() {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ts.size(); ++i)
      if (vs[i] != 0.0) {
        lx.push_back(ts[i]);
        ly.push_back(std::log(std::fabs(vs[i])));
      }
    if (lx.size() < 8)
      throw InsufficientData("fit_decay needs at least 8 usable points");
    const LinFit lf = least_squares(lx, ly);
    fit.exponent = lf.slope;
    fit.amplitude = std::exp(lf.intercept);
    fit.residual = lf.rms;
  };

  if (!oscillatory) {
    direct_fit();
    return fit;
  }

  // Zero crossings in log p, linearly interpolated.  One gap between two
  // crossings already determines the period (they sit half a period apart).
  std::vector<double> crossings;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i)
    if (vs[i] * vs[i + 1] < 0.0)
      crossings.push_back(ts[i] + (ts[i + 1] - ts[i]) * vs[i] / (vs[i] - vs[i + 1]));
  if (crossings.size() >= 2) {
    double mean_gap = (crossings.back() - crossings.front()) /
                      static_cast<double>(crossings.size() - 1);
    fit.log_period = 2.0 * mean_gap;
  } else {
    direct_fit();  // no oscillation resolved; fall back to the plain fit
    return fit;
  }

  // Quadrature envelope: for v(t) = A e^{st} cos(wt + phi), the shifted
  // combination v(t)^2 + e^{-2 s tau} v(t + tau)^2 with tau = quarter period
  // equals A^2 e^{2st} exactly, removing the phase.  s enters the weight, so
  // iterate the fit a few times.
  const double tau = fit.log_period / 4.0;
  auto interp = [&](double t) -> double {
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    if (it == ts.begin() || it == ts.end()) return kNaN;
    const std::size_t j = static_cast<std::size_t>(it - ts.begin());
    const double w = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
    return vs[j - 1] + w * (vs[j] - vs[j - 1]);
  };

  double s = -1.0;
  {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ts.size(); ++i)
      if (vs[i] != 0.0) {
        lx.push_back(ts[i]);
        ly.push_back(std::log(std::fabs(vs[i])));
      }
    if (lx.size() >= 2) s = least_squares(lx, ly).slope;
  }

  LinFit lf;
  for (int iter = 0; iter < 4; ++iter) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double v2 = interp(ts[i] + tau);
      if (!std::isfinite(v2)) continue;
      const double env2 = vs[i] * vs[i] + std::exp(-2.0 * s * tau) * v2 * v2;
      if (!(env2 > 0.0)) continue;
      lx.push_back(ts[i]);
      ly.push_back(0.5 * std::log(env2));
    }
    if (lx.size() < 8)
      throw InsufficientData("fit_decay needs at least 8 envelope points");
    lf = least_squares(lx, ly);
    s = lf.slope;
  }
  fit.exponent = lf.slope;
  fit.amplitude = std::exp(lf.intercept);
  fit.residual = lf.rms;
  return fit;
}

// ---------------------------------------------------------------------------
// Appendix inequality suite.
// ---------------------------------------------------------------------------

namespace {

class InequalityChecker {
 public:
  explicit InequalityChecker(const std::string& name) { r_.name = name; }

  // Registers one sample: requires lhs <= rhs up to an honest FP allowance.
  template <typename WitnessFn>
  void sample(double lhs, double rhs, WitnessFn witness) {
    ++r_.samples;
    const double slack = rhs - lhs;
    const double tol =
        4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(lhs) + std::fabs(rhs));
    // A non-finite side means the sampled inputs left the inequality's
    // domain; count it as a failure rather than skipping it silently.
    if (!std::isfinite(slack) || lhs > rhs + tol) {
      ++r_.failures;
      if (r_.witness.empty()) r_.witness = witness();
      return;
    }
    if (!seeded_ || slack < r_.worst_margin) r_.worst_margin = slack;
    seeded_ = true;
  }

  InequalityResult finish() {
    r_.pass = r_.failures == 0;
    return r_;
  }

 private:
  InequalityResult r_;
  bool seeded_ = false;
};

std::string fmt_witness(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) os << ", ";
    os << k << " = " << v;
    first = false;
  }
  return os.str();
}

// Random xi_q on (lo_q, hi_q] -> prefix logs of (1 + xi_q/q^3); returns the
// plain sums too for the linearization lemmas.
struct ProductSample {
  std::vector<double> xi;          // indexed by q, valid on [2, p-1]
  std::vector<double> log_prefix;  // prefix_[q] = sum_{r=2}^q log(1+xi_r/r^3)
  std::vector<double> lin_prefix;  // prefix of xi_r/r^3

  void build(std::int64_t p) {
    log_prefix.assign(static_cast<std::size_t>(p), 0.0);
    lin_prefix.assign(static_cast<std::size_t>(p), 0.0);
    for (std::int64_t q = 2; q < p; ++q) {
      const double q3 =
          static_cast<double>(q) * static_cast<double>(q) * static_cast<double>(q);
      log_prefix[static_cast<std::size_t>(q)] =
          log_prefix[static_cast<std::size_t>(q - 1)] +
          std::log1p(xi[static_cast<std::size_t>(q)] / q3);
      lin_prefix[static_cast<std::size_t>(q)] =
          lin_prefix[static_cast<std::size_t>(q - 1)] +
          xi[static_cast<std::size_t>(q)] / q3;
    }
  }
  // prod_{p1<q<p} (1+xi_q/q^3)^{p1} - 1
  double prod_m1(std::int64_t p1, std::int64_t p) const {
    return std::expm1(static_cast<double>(p1) *
                      (log_prefix[static_cast<std::size_t>(p - 1)] -
                       log_prefix[static_cast<std::size_t>(p1)]));
  }
  double lin_sum(std::int64_t p1, std::int64_t p) const {
    return lin_prefix[static_cast<std::size_t>(p - 1)] -
           lin_prefix[static_cast<std::size_t>(p1)];
  }
};

}  // namespace

AppendixReport appendix_inequality_suite(std::int64_t samples, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("appendix suite needs samples >= 1");
  std::mt19937_64 rng(seed);
  auto unif = [&rng](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
  };
  auto unif_int = [&rng](std::int64_t a, std::int64_t b) {
    return std::uniform_int_distribution<std::int64_t>(a, b)(rng);
  };

  AppendixReport report;

  {  // log(1+x) <= x for x > -1
    InequalityChecker c("log_upper");
    for (std::int64_t i = 0; i < samples; ++i) {
      const double x = unif(-0.999999, 10.0);
      c.sample(std::log1p(x), x, [&] { return fmt_witness({{"x", x}}); });
    }
    report.results.push_back(c.finish());
  }
  {  // sum_{q=N+1}^M q^{-a-1} <= (N^{-a} - M^{-a})/a
    InequalityChecker c("tail_sum");
    for (std::int64_t i = 0; i < samples; ++i) {
      const double a = unif(0.05, 3.0);
      const std::int64_t N = unif_int(1, 50);
      const std::int64_t M = N + unif_int(1, 200);
      CompensatedAccumulator s;
      for (std::int64_t q = N + 1; q <= M; ++q)
        s.add(std::pow(static_cast<double>(q), -a - 1.0));
      const double rhs = (std::pow(static_cast<double>(N), -a) -
                          std::pow(static_cast<double>(M), -a)) /
                         a;
      c.sample(s.value(), rhs, [&] {
        return fmt_witness({{"alpha", a},
                            {"N", static_cast<double>(N)},
                            {"M", static_cast<double>(M)}});
      });
    }
    report.results.push_back(c.finish());
  }
  {  // e^{x/2} <= 1+x on [0,1]
    InequalityChecker c("exp_half");
    for (std::int64_t i = 0; i < samples; ++i) {
      const double x = unif(0.0, 1.0);
      c.sample(std::exp(0.5 * x), 1.0 + x, [&] { return fmt_witness({{"x", x}}); });
    }
    report.results.push_back(c.finish());
  }
  {  // e^{2x} <= 1+x on [-1/4, 0]
    InequalityChecker c("exp_double");
    for (std::int64_t i = 0; i < samples; ++i) {
      const double x = unif(-0.25, 0.0);
      c.sample(std::exp(2.0 * x), 1.0 + x, [&] { return fmt_witness({{"x", x}}); });
    }
    report.results.push_back(c.finish());
  }
  {  // e^x <= 1+x+x^2 for |x| <= 1/2
    InequalityChecker c("exp_quadratic");
    for (std::int64_t i = 0; i < samples; ++i) {
      const double x = unif(-0.5, 0.5);
      c.sample(std::exp(x), 1.0 + x + x * x, [&] { return fmt_witness({{"x", x}}); });
    }
    report.results.push_back(c.finish());
  }
  {  // log(1+x) >= x - x^2 for |x| <= 1/4  (check as x - x^2 <= log(1+x))
    InequalityChecker c("log_lower");
    for (std::int64_t i = 0; i < samples; ++i) {
      const double x = unif(-0.25, 0.25);
      c.sample(x - x * x, std::log1p(x), [&] { return fmt_witness({{"x", x}}); });
    }
    report.results.push_back(c.finish());
  }
  {  // |p^3((1+x/p^2)^{-1/p} - 1) + x| <= 5 x^2/(4 p^2), |x| <= D1, p >= max(2 sqrt(D1), 7)
    InequalityChecker c("inverse_power_expansion");
    const double d1_grid[] = {1.0, 4.0, 16.0};
    for (std::int64_t i = 0; i < samples; ++i) {
      const double D1 = (i % 4 == 3) ? unif(0.1, 16.0) : d1_grid[i % 4];
      const std::int64_t p_lo = std::max<std::int64_t>(
          7, static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(D1))));
      const std::int64_t p = unif_int(p_lo, 10000);
      const double x = unif(-D1, D1);
      const double pd = static_cast<double>(p);
      const double lhs = std::fabs(
          pd * pd * pd * std::expm1(-std::log1p(x / (pd * pd)) / pd) + x);
      c.sample(lhs, 1.25 * x * x / (pd * pd), [&] {
        return fmt_witness({{"x", x}, {"p", pd}, {"D1", D1}});
      });
    }
    report.results.push_back(c.finish());
  }
  {  // |prod_{p1<q<p}(1+xi_q/q^3)^{p1} - 1| <= A/p1 for p1 >= N0 >= max(1, A)
    InequalityChecker c("product_deviation");
    ProductSample ps;
    for (std::int64_t i = 0; i < samples; ++i) {
      const std::int64_t N0 = unif_int(1, 12);
      const double A = unif(0.05, static_cast<double>(N0));
      const std::int64_t p1 = unif_int(N0, N0 + 40);
      const std::int64_t p = p1 + unif_int(2, 300);
      ps.xi.assign(static_cast<std::size_t>(p), 0.0);
      for (std::int64_t q = p1 + 1; q < p; ++q)
        ps.xi[static_cast<std::size_t>(q)] = unif(-A, A);
      ps.build(p);
      c.sample(std::fabs(ps.prod_m1(p1, p)), A / static_cast<double>(p1), [&] {
        return fmt_witness({{"A", A},
                            {"N0", static_cast<double>(N0)},
                            {"p1", static_cast<double>(p1)},
                            {"p", static_cast<double>(p)}});
      });
    }
    report.results.push_back(c.finish());
  }
  {  // sum_{N0<=p1<=p-3} (p1/p)^2/(p-1)^2 |prod - 1| <= A/(2p^2)
    InequalityChecker c("product_quadratic_tail");
    ProductSample ps;
    for (std::int64_t i = 0; i < samples; ++i) {
      const std::int64_t N0 = unif_int(1, 12);
      const double A = unif(0.05, static_cast<double>(N0));
      const std::int64_t p = N0 + unif_int(4, 300);
      ps.xi.assign(static_cast<std::size_t>(p), 0.0);
      for (std::int64_t q = N0 + 1; q < p; ++q)
        ps.xi[static_cast<std::size_t>(q)] = unif(-A, A);
      ps.build(p);
      const double pd = static_cast<double>(p);
      CompensatedAccumulator lhs;
      for (std::int64_t p1 = N0; p1 <= p - 3; ++p1) {
        const double g = static_cast<double>(p1) / pd;
        lhs.add(g * g / ((pd - 1.0) * (pd - 1.0)) * std::fabs(ps.prod_m1(p1, p)));
      }
      c.sample(lhs.value(), A / (2.0 * pd * pd), [&] {
        return fmt_witness(
            {{"A", A}, {"N0", static_cast<double>(N0)}, {"p", pd}});
      });
    }
    report.results.push_back(c.finish());
  }
  {  // full quadratic sum with the small-p1 block controlled by A2
    InequalityChecker c("product_quadratic_full");
    ProductSample ps;
    for (std::int64_t i = 0; i < samples; ++i) {
      const std::int64_t N0 = unif_int(2, 12);
      const double A1 = unif(0.05, static_cast<double>(N0));
      const double B = unif(0.1, 20.0);
      const std::int64_t p = N0 + unif_int(4, 300);
      ps.xi.assign(static_cast<std::size_t>(p), 0.0);
      for (std::int64_t q = 2; q < p; ++q) {
        // Keep 1 + xi_q/q^3 bounded away from zero so the products exist.
        const double cap =
            q <= N0 ? std::min(B, 0.9 * static_cast<double>(q * q * q)) : A1;
        ps.xi[static_cast<std::size_t>(q)] = unif(-cap, cap);
      }
      ps.build(p);
      // Measure the product hypothesis constant A2 on this sample.
      double A2 = 1.0;
      for (std::int64_t p1 = 1; p1 <= N0; ++p1)
        A2 = std::max(A2, std::fabs(std::exp(static_cast<double>(p1) *
                                             (ps.log_prefix[static_cast<std::size_t>(N0)] -
                                              ps.log_prefix[static_cast<std::size_t>(p1)]))));
      const double pd = static_cast<double>(p);
      CompensatedAccumulator lhs;
      for (std::int64_t p1 = 1; p1 <= p - 3; ++p1) {
        const double g = static_cast<double>(p1) / pd;
        lhs.add(g * g / ((pd - 1.0) * (pd - 1.0)) * std::fabs(ps.prod_m1(p1, p)));
      }
      const double n0 = static_cast<double>(N0);
      const double rhs = A1 / (2.0 * pd * pd) +
                         n0 * n0 * n0 / (3.0 * (pd - 1.0) * (pd - 1.0) * pd * pd) *
                             (1.0 + A2 * (1.0 + A1 / n0));
      c.sample(lhs.value(), rhs, [&] {
        return fmt_witness(
            {{"A1", A1}, {"A2", A2}, {"N0", n0}, {"p", pd}});
      });
    }
    report.results.push_back(c.finish());
  }
  {  // |prod - (1 + p1 sum xi_q/q^3)| <= A^2/(4 p1^2) for p1 >= N0
    InequalityChecker c("product_linearization");
    ProductSample ps;
    for (std::int64_t i = 0; i < samples; ++i) {
      const std::int64_t N0 = unif_int(1, 12);
      const double A = unif(0.05, static_cast<double>(N0));
      const std::int64_t p1 = unif_int(N0, N0 + 40);
      const std::int64_t p = p1 + unif_int(2, 300);
      ps.xi.assign(static_cast<std::size_t>(p), 0.0);
      for (std::int64_t q = p1 + 1; q < p; ++q)
        ps.xi[static_cast<std::size_t>(q)] = unif(-A, A);
      ps.build(p);
      const double lhs = std::fabs(ps.prod_m1(p1, p) -
                                   static_cast<double>(p1) * ps.lin_sum(p1, p));
      c.sample(lhs, A * A / (4.0 * static_cast<double>(p1) * static_cast<double>(p1)),
               [&] {
                 return fmt_witness({{"A", A},
                                     {"N0", static_cast<double>(N0)},
                                     {"p1", static_cast<double>(p1)},
                                     {"p", static_cast<double>(p)}});
               });
    }
    report.results.push_back(c.finish());
  }
  {  // weighted sum of linearization defects with the log(p-3) envelope
    InequalityChecker c("product_linearization_sum");
    ProductSample ps;
    for (std::int64_t i = 0; i < samples; ++i) {
      const std::int64_t N0 = unif_int(2, 12);
      const double A1 = unif(0.05, static_cast<double>(N0));
      const double B = unif(0.1, 20.0);
      const std::int64_t p = N0 + unif_int(4, 300);
      ps.xi.assign(static_cast<std::size_t>(p), 0.0);
      for (std::int64_t q = 2; q < p; ++q) {
        const double cap =
            q <= N0 ? std::min(B, 0.9 * static_cast<double>(q * q * q)) : A1;
        ps.xi[static_cast<std::size_t>(q)] = unif(-cap, cap);
      }
      ps.build(p);
      double A2 = 1.0, A3 = 0.0;
      for (std::int64_t p1 = 1; p1 <= N0; ++p1)
        A2 = std::max(A2, std::fabs(std::exp(static_cast<double>(p1) *
                                             (ps.log_prefix[static_cast<std::size_t>(N0)] -
                                              ps.log_prefix[static_cast<std::size_t>(p1)]))));
      for (std::int64_t q = 2; q <= N0; ++q)
        A3 = std::max(A3, std::fabs(ps.xi[static_cast<std::size_t>(q)]));
      const double pd = static_cast<double>(p);
      CompensatedAccumulator lhs;
      for (std::int64_t p1 = 1; p1 <= p - 3; ++p1) {
        const double g = static_cast<double>(p1) / pd;
        lhs.add(g / (pd - 1.0) *
                std::fabs(ps.prod_m1(p1, p) -
                          static_cast<double>(p1) * ps.lin_sum(p1, p)));
      }
      const double n0 = static_cast<double>(N0);
      const double rhs =
          A1 * A1 * std::log(pd - 3.0) / (4.0 * pd * (pd - 1.0)) +
          ((1.0 + A2) / 2.0 * n0 * n0 + ((3.0 * A2 + 1.0) * A1 + 3.0 * A3) / 6.0 * n0) /
              (pd * (pd - 1.0));
      c.sample(lhs.value(), rhs, [&] {
        return fmt_witness(
            {{"A1", A1}, {"A2", A2}, {"A3", A3}, {"N0", n0}, {"p", pd}});
      });
    }
    report.results.push_back(c.finish());
  }

  report.all_pass = true;
  for (const auto& r : report.results) report.all_pass = report.all_pass && r.pass;
  return report;
}

// ---------------------------------------------------------------------------
// Named-check suite.
// ---------------------------------------------------------------------------

const std::vector<std::string>& known_check_names() {
  static const std::vector<std::string> names = {
      "identity",  "main_lemma", "h_order", "nonlinear_bound", "ansatz",
      "base_case", "hat_xi",     "appendix", "xi_decay",        "delta_decay"};
  return names;
}

VerificationReport run_verification_suite(const RecurrenceTrace& trace,
                                          const RealPolynomial& f,
                                          const std::vector<std::string>& selected) {
  const auto& known = known_check_names();
  std::vector<std::string> run = selected.empty() ? known : selected;
  for (const auto& name : run)
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw ConfigError("unknown check name: " + name);
  auto wants = [&run](const char* name) {
    return std::find(run.begin(), run.end(), name) != run.end();
  };

  const RealPolynomial ft = symmetrize(f);
  const RealPolynomial G = kernel_G(ft);
  const std::int64_t limit = trace.xi_limit;

  VerificationReport rep;
  auto push = [&rep](CheckResult c) { rep.checks.push_back(std::move(c)); };

  if (wants("identity")) {
    CheckResult c;
    c.name = "identity";
    c.threshold = 1e-8;
    DecompositionScanner scan(trace, ft);
    const std::int64_t hi = std::min<std::int64_t>(1000, scan.max_p());
    for (std::int64_t p = 3; p <= hi; ++p) {
      const DecompositionTerms t = scan.terms(p);
      const double rel = t.identity_residual() / (1.0 + std::fabs(t.Q));
      if (rel > c.measured_constant) {
        c.measured_constant = rel;
        c.worst_p = p;
      }
    }
    c.pass = c.measured_constant < c.threshold;
    c.details = "max relative defect of R1 + R2 - Q - N over 3 <= p <= " +
                std::to_string(hi);
    push(c);
  }

  if (wants("main_lemma")) {
    CheckResult c;
    c.name = "main_lemma";
    const std::int64_t hi = std::min<std::int64_t>(2000, limit);
    const std::vector<double> res = main_lemma_residuals(trace, ft, 10, hi);
    double early = 0.0, late = 0.0;
    for (std::int64_t p = 10; p <= hi; ++p) {
      const double env = res[static_cast<std::size_t>(p - 10)] * static_cast<double>(p) /
                         std::log(static_cast<double>(p));
      if (env > c.measured_constant) {
        c.measured_constant = env;
        c.worst_p = p;
      }
      if (p <= 100)
        early = std::max(early, env);
      else
        late = std::max(late, env);
    }
    c.threshold = early;
    c.pass = late <= early;
    c.details = "envelope constant of |p dQ - p/(p-1) xi + (1/p) sum G xi| vs log p/p; "
                "must be attained by p = 100";
    push(c);
  }

  if (wants("h_order")) {
    CheckResult c;
    c.name = "h_order";
    c.threshold = -0.2;
    const std::vector<double> h = h_sequence(trace, G);
    const std::int64_t hi = std::min<std::int64_t>(4096, limit);
    const std::int64_t lo = std::max<std::int64_t>(16, hi / 16);
    try {
      const DecayFit fh = fit_decay(h, lo, hi, true);
      const DecayFit fx = fit_decay(trace.xi, lo, hi, true);
      c.measured_constant = fh.exponent - fx.exponent;
      c.pass = c.measured_constant <= c.threshold;
      c.details = "h envelope exponent minus xi envelope exponent";
    } catch (const InsufficientData& e) {
      c.pass = false;
      c.details = e.what();
    }
    push(c);
  }

  if (wants("nonlinear_bound")) {
    CheckResult c;
    c.name = "nonlinear_bound";
    c.threshold = 1.0;
    try {
      const AnsatzConstants k = fit_ansatz_constants(trace, 10, 0.2);
      const std::int64_t hi = std::min<std::int64_t>(2000, limit);
      // Hypotheses at the largest p cover every smaller p.
      NonlinearBoundReport last = nonlinear_bound_check(trace, ft, k, hi);
      DecompositionScanner scan(trace, ft);
      const double ft_sup = ft.sup_norm01();
      for (std::int64_t p = 2 * k.N0; p <= hi; ++p) {
        const double actual = std::fabs(scan.terms(p).Npp);
        const double bound =
            nonlinear_bound_value(k, last.sigma, last.c_sigma, ft_sup, p);
        const double ratio = actual / bound;
        if (ratio > c.measured_constant) {
          c.measured_constant = ratio;
          c.worst_p = p;
        }
      }
      c.pass = c.measured_constant <= 1.0;
      c.details = "max |N_p|/bound over [2 N0, " + std::to_string(hi) +
                  "] with fitted C1 = " + std::to_string(k.C1) +
                  ", C2 = " + std::to_string(k.C2) + ", N0 = " + std::to_string(k.N0);
    } catch (const Error& e) {
      c.pass = false;
      c.details = e.what();
    }
    push(c);
  }

  if (wants("ansatz")) {
    CheckResult c;
    c.name = "ansatz";
    try {
      AnsatzConstants k = fit_ansatz_constants(trace, 10, 0.2);
      const AnsatzReport ar = ansatz_check(trace, k, limit);
      c.measured_constant = ar.feasible_A1;
      c.pass = ar.all_pass && std::isfinite(ar.feasible_A1) &&
               std::isfinite(ar.feasible_A2) && std::isfinite(ar.feasible_A3);
      c.threshold = k.A1;
      c.details = "feasible (A1, A2, A3) = (" + std::to_string(ar.feasible_A1) + ", " +
                  std::to_string(ar.feasible_A2) + ", " + std::to_string(ar.feasible_A3) +
                  ") at N0 = 10";
    } catch (const Error& e) {
      c.pass = false;
      c.details = e.what();
    }
    push(c);
  }

  if (wants("base_case")) {
    CheckResult c;
    c.name = "base_case";
    c.threshold = 500.0;
    try {
      AnsatzConstants k;
      k.epsilon = 0.2;
      k.p0 = 100;
      const BaseCaseReport br = base_case_verifier(trace, G, k);
      c.measured_constant = static_cast<double>(br.p0);
      c.worst_p = br.worst_r;
      c.pass = br.feasible && br.p0 <= 500;
      c.details = "epsilon = 0.2, feasible C4 = " + std::to_string(br.C4) +
                  ", margin-2 threshold p0 = " + std::to_string(br.p0);
    } catch (const Error& e) {
      c.pass = false;
      c.details = e.what();
    }
    push(c);
  }

  if (wants("hat_xi")) {
    CheckResult c;
    c.name = "hat_xi";
    c.threshold = 1.25;
    const HatXiReport hr = hat_xi_companion_check(trace);
    c.measured_constant = hr.max_ratio;
    c.worst_p = hr.worst_p;
    c.pass = hr.pass;
    c.details = "sup |hat xi - xi| p^2 / xi^2";
    push(c);
  }

  if (wants("appendix")) {
    CheckResult c;
    c.name = "appendix";
    c.threshold = 0.0;
    const AppendixReport ar = appendix_inequality_suite(100000, 20260815);
    std::int64_t failures = 0;
    std::string first_witness;
    for (const auto& r : ar.results) {
      failures += r.failures;
      if (!r.pass && first_witness.empty()) first_witness = r.name + ": " + r.witness;
    }
    c.measured_constant = static_cast<double>(failures);
    c.pass = ar.all_pass;
    c.details = ar.all_pass ? "12 inequality families x 1e5 samples"
                            : "first witness -> " + first_witness;
    push(c);
  }

  if (wants("xi_decay")) {
    CheckResult c;
    c.name = "xi_decay";
    c.threshold = 0.1;
    const std::int64_t hi = std::min<std::int64_t>(4096, limit);
    const std::int64_t lo = std::max<std::int64_t>(16, hi / 16);
    try {
      const DecayFit fx = fit_decay(trace.xi, lo, hi, true);
      const Spectrum spec = characteristic_spectrum(ft);
      const double want = spec.sigma_G;
      const double want_period =
          2.0 * 3.14159265358979323846 / std::fabs(spec.roots.front().imag());
      c.measured_constant = fx.exponent;
      c.pass = std::fabs(fx.exponent - want) <= 0.1 &&
               std::isfinite(fx.log_period) &&
               std::fabs(fx.log_period - want_period) <= 0.15;
      std::ostringstream os;
      os.precision(6);
      os << "envelope exponent " << fx.exponent << " (want " << want
         << " +- 0.1), log-period " << fx.log_period << " (want " << want_period
         << " +- 0.15) on [" << lo << ", " << hi << "]";
      c.details = os.str();
    } catch (const Error& e) {
      c.pass = false;
      c.details = e.what();
    }
    push(c);
  }

  if (wants("delta_decay")) {
    CheckResult c;
    c.name = "delta_decay";
    c.threshold = 0.1;
    if (!trace.x_star_estimated) {
      c.pass = false;
      c.details = "x* not estimated on this trace";
    } else {
      const std::int64_t hi = trace.P;
      const std::int64_t lo = std::max<std::int64_t>(16, hi / 32);
      try {
        const DecayFit fd = fit_decay(trace.delta, lo, hi, true);
        const Spectrum spec = characteristic_spectrum(ft);
        const double want = -spec.alpha_f;
        c.measured_constant = fd.exponent;
        c.pass = std::fabs(fd.exponent - want) <= 0.1;
        std::ostringstream os;
        os.precision(6);
        os << "delta envelope exponent " << fd.exponent << " (want " << want
           << " +- 0.1) on [" << lo << ", " << hi << "]";
        c.details = os.str();
      } catch (const Error& e) {
        c.pass = false;
        c.details = e.what();
      }
    }
    push(c);
  }

  rep.all_pass = true;
  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

}  // namespace recurflow
