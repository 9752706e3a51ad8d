#include "recurflow/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "recurflow/errors.hpp"
#include "recurflow/roots.hpp"

namespace recurflow {

namespace {

// Dense power-basis coefficients when every exponent is a small nonnegative
// integer; the O(P^2) inner loop then runs on a real Horner instead of pow().
bool as_dense_real(const MonomialKernel& k, std::vector<double>& coeffs) {
  coeffs.clear();
  for (const auto& t : k.terms) {
    if (t.coeff.imag() != 0.0 || t.alpha.imag() != 0.0) return false;
    const double a = t.alpha.real();
    if (a < 0.0 || a > 64.0 || a != std::floor(a)) return false;
    const auto n = static_cast<std::size_t>(a);
    if (coeffs.size() <= n) coeffs.resize(n + 1, 0.0);
    coeffs[n] += t.coeff.real();
  }
  return true;
}

double eval_dense(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

double eval_real_kernel(const MonomialKernel& k, double gamma) {
  double r = 0.0;
  for (const auto& t : k.terms) r += t.coeff.real() * std::pow(gamma, t.alpha.real());
  return r;
}

struct ComplexAccumulator {
  CompensatedAccumulator re, im;
  void add(const Complex& z) {
    re.add(z.real());
    im.add(z.imag());
  }
  Complex value() const { return {re.value(), im.value()}; }
};

Complex cpow_pos(double base, const Complex& e) { return std::exp(e * std::log(base)); }

}  // namespace

LinearTrace run_linear(const MonomialKernel& kernel, double xi2,
                       const std::vector<double>& h, std::int64_t P) {
  if (P < 3) throw ConfigError("run_linear requires P >= 3");
  if (!kernel.real_valued())
    throw ConfigError("run_linear requires a real-valued kernel");
  if (!h.empty() && static_cast<std::int64_t>(h.size()) < P + 1)
    throw ConfigError("forcing sequence must be empty or sized >= P+1");

  LinearTrace t;
  t.P = P;
  t.kernel = kernel;
  t.h.assign(static_cast<std::size_t>(P) + 1, 0.0);
  if (!h.empty())
    std::copy(h.begin(), h.begin() + static_cast<std::size_t>(P) + 1, t.h.begin());
  t.xi.assign(static_cast<std::size_t>(P) + 1, 0.0);
  t.xi[2] = xi2;

  std::vector<double> dense;
  const bool fast = as_dense_real(kernel, dense);
  for (std::int64_t p = 3; p <= P; ++p) {
    const double invp = 1.0 / static_cast<double>(p);
    double s = 0.0;
    if (fast) {
      for (std::int64_t q = 2; q < p; ++q)
        s += eval_dense(dense, static_cast<double>(q) * invp) *
             t.xi[static_cast<std::size_t>(q)];
    } else {
      for (std::int64_t q = 2; q < p; ++q)
        s += eval_real_kernel(kernel, static_cast<double>(q) * invp) *
             t.xi[static_cast<std::size_t>(q)];
    }
    t.xi[static_cast<std::size_t>(p)] = t.h[static_cast<std::size_t>(p)] + s * invp;
  }
  return t;
}

double linear_residual(const LinearTrace& trace) {
  double worst = 0.0;
  for (std::int64_t p = 3; p <= trace.P; ++p) {
    CompensatedAccumulator s;
    for (std::int64_t q = 2; q < p; ++q)
      s.add(eval_real_kernel(trace.kernel,
                             static_cast<double>(q) / static_cast<double>(p)) *
            trace.xi[static_cast<std::size_t>(q)]);
    const double recon = trace.h[static_cast<std::size_t>(p)] +
                         s.value() / static_cast<double>(p);
    worst = std::max(worst, std::fabs(trace.xi[static_cast<std::size_t>(p)] - recon));
  }
  return worst;
}

MomentState moment_transform(const LinearTrace& trace) {
  const auto& terms = trace.kernel.terms;
  const int N = static_cast<int>(terms.size());
  const std::int64_t P = trace.P;

  MomentState m;
  m.N = N;
  m.B.assign(N, std::vector<Complex>(static_cast<std::size_t>(P) + 1, Complex(0.0, 0.0)));
  m.B_tilde = m.B;

  std::vector<ComplexAccumulator> acc(static_cast<std::size_t>(N));
  for (std::int64_t p = 2; p <= P; ++p) {
    const double lp = std::log(static_cast<double>(p));
    for (int k = 0; k < N; ++k) {
      acc[static_cast<std::size_t>(k)].add(trace.xi[static_cast<std::size_t>(p)] *
                                           std::exp(terms[static_cast<std::size_t>(k)].alpha * lp));
      const Complex b = acc[static_cast<std::size_t>(k)].value();
      m.B[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)] = b;
      m.B_tilde[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)] =
          b * std::exp(-(terms[static_cast<std::size_t>(k)].alpha + 1.0) * lp);
    }
  }

  for (std::int64_t p = 2; p <= P; ++p) {
    double norm2 = 0.0;
    for (int k = 0; k < N; ++k)
      norm2 += std::norm(m.B_tilde[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)]);
    m.sup_B_tilde_norm = std::max(m.sup_B_tilde_norm, std::sqrt(norm2));
  }

  for (std::int64_t p = 3; p <= P; ++p) {
    const double lp = std::log(static_cast<double>(p));
    Complex recon(trace.h[static_cast<std::size_t>(p)], 0.0);
    for (int k = 0; k < N; ++k)
      recon += terms[static_cast<std::size_t>(k)].coeff *
               std::exp(-(terms[static_cast<std::size_t>(k)].alpha + 1.0) * lp) *
               m.B[static_cast<std::size_t>(k)][static_cast<std::size_t>(p - 1)];
    m.reconstruction_residual =
        std::max(m.reconstruction_residual,
                 std::abs(recon - Complex(trace.xi[static_cast<std::size_t>(p)], 0.0)));
  }
  return m;
}

TransitionMatrix transition_matrix(const MonomialKernel& kernel, std::int64_t p) {
  if (p < 2) throw ConfigError("transition_matrix requires p >= 2");
  const auto& terms = kernel.terms;
  const int N = static_cast<int>(terms.size());
  const double base = 1.0 - 1.0 / static_cast<double>(p);

  TransitionMatrix m;
  m.p = p;
  m.entries = ComplexMatrix(N);
  std::vector<Complex> pw(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i)
    pw[static_cast<std::size_t>(i)] =
        cpow_pos(base, terms[static_cast<std::size_t>(i)].alpha + 1.0);
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < N; ++j) {
      Complex v = terms[static_cast<std::size_t>(j)].coeff *
                  pw[static_cast<std::size_t>(j)] / static_cast<double>(p);
      if (k == j) v += pw[static_cast<std::size_t>(k)];
      m.entries(k, j) = v;
    }
  return m;
}

std::vector<double> linear_via_moments(const MonomialKernel& kernel, double xi2,
                                       const std::vector<double>& h, std::int64_t P) {
  if (P < 3) throw ConfigError("linear_via_moments requires P >= 3");
  const auto& terms = kernel.terms;
  const int N = static_cast<int>(terms.size());

  std::vector<double> xi(static_cast<std::size_t>(P) + 1, 0.0);
  xi[2] = xi2;
  // B_tilde_2 = 2^{-alpha-1} xi_2 2^{alpha} = xi_2/2 in every component.
  std::vector<Complex> bt(static_cast<std::size_t>(N), Complex(xi2 / 2.0, 0.0));
  std::vector<Complex> next(static_cast<std::size_t>(N));

  for (std::int64_t p = 3; p <= P; ++p) {
    const double hp =
        h.empty() ? 0.0 : (static_cast<std::int64_t>(h.size()) > p ? h[static_cast<std::size_t>(p)] : 0.0);
    // xi_p = h_p + sum_j C_j (1-1/p)^{alpha_j+1} B_tilde_{p-1}^{(j)}.
    const double base = 1.0 - 1.0 / static_cast<double>(p);
    Complex x(hp, 0.0);
    for (int j = 0; j < N; ++j)
      x += terms[static_cast<std::size_t>(j)].coeff *
           cpow_pos(base, terms[static_cast<std::size_t>(j)].alpha + 1.0) *
           bt[static_cast<std::size_t>(j)];
    xi[static_cast<std::size_t>(p)] = x.real();

    const TransitionMatrix M = transition_matrix(kernel, p);
    for (int k = 0; k < N; ++k) {
      Complex v(hp / static_cast<double>(p), 0.0);
      for (int j = 0; j < N; ++j)
        v += M.entries(k, j) * bt[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(k)] = v;
    }
    bt.swap(next);
  }
  return xi;
}

ScanReport product_norm_scan(const MonomialKernel& kernel,
                             const std::vector<std::int64_t>& q0_set, std::int64_t P,
                             double norm_cap) {
  const Spectrum spec = sigma_of_kernel(kernel);
  if (spec.sigma_G > 1e-9)
    throw HypothesisViolated(
        "product_norm_scan requires max Re sigma <= 0; shift the kernel by a "
        "maximal characteristic root first (measured max Re sigma = " +
        std::to_string(spec.sigma_G) + ")");

  ScanReport report;
  for (std::int64_t q0 : q0_set) {
    if (q0 < 2) throw ConfigError("product_norm_scan requires q0 >= 2");
    ScanEntry entry;
    entry.q0 = q0;

    ComplexMatrix prod = transition_matrix(kernel, q0).entries;
    double sup_half = 0.0;  // running sup at p = P/2, for the plateau flag
    std::int64_t next_mark = q0;
    for (std::int64_t p = q0; p <= P; ++p) {
      if (p > q0) prod = transition_matrix(kernel, p).entries * prod;
      const double nrm = spectral_norm(prod);
      if (nrm > norm_cap)
        throw NormBlowup("matrix product norm exceeded cap during scan", p, nrm);
      entry.sup_norm = std::max(entry.sup_norm, nrm);
      if (p == P / 2) sup_half = entry.sup_norm;
      if (p >= next_mark || p == P) {
        entry.profile.emplace_back(p, entry.sup_norm);
        next_mark = std::max(next_mark + 1, static_cast<std::int64_t>(
                                                static_cast<double>(next_mark) * 1.15));
      }
    }
    entry.plateau_detected =
        sup_half > 0.0 && (entry.sup_norm - sup_half) <= 0.05 * entry.sup_norm;
    report.overall_sup = std::max(report.overall_sup, entry.sup_norm);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

EigenReport eigen_check(const MonomialKernel& kernel) {
  const auto& terms = kernel.terms;
  const int N = static_cast<int>(terms.size());
  if (N == 0) throw DegenerateKernel("eigen_check needs a nonempty kernel");

  EigenReport r;
  r.m_tilde = ComplexMatrix(N);
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < N; ++j) {
      Complex v = terms[static_cast<std::size_t>(j)].coeff;
      if (k == j) v -= terms[static_cast<std::size_t>(k)].alpha + 1.0;
      r.m_tilde(k, j) = v;
    }

  // Characteristic polynomial from power-sum traces via Newton's identities:
  // p_k = tr(A^k), e_k = (1/k) sum_{i=1}^k (-1)^{i-1} e_{k-i} p_i, and the
  // coefficient of lambda^{N-k} is (-1)^k e_k.
  std::vector<Complex> psum(static_cast<std::size_t>(N) + 1, Complex(0.0, 0.0));
  ComplexMatrix Ak = r.m_tilde;
  for (int k = 1; k <= N; ++k) {
    if (k > 1) Ak = r.m_tilde * Ak;
    Complex tr(0.0, 0.0);
    for (int i = 0; i < N; ++i) tr += Ak(i, i);
    psum[static_cast<std::size_t>(k)] = tr;
  }
  std::vector<Complex> esym(static_cast<std::size_t>(N) + 1, Complex(0.0, 0.0));
  esym[0] = Complex(1.0, 0.0);
  for (int k = 1; k <= N; ++k) {
    Complex s(0.0, 0.0);
    double sign = 1.0;
    for (int i = 1; i <= k; ++i) {
      s += sign * esym[static_cast<std::size_t>(k - i)] * psum[static_cast<std::size_t>(i)];
      sign = -sign;
    }
    esym[static_cast<std::size_t>(k)] = s / static_cast<double>(k);
  }
  std::vector<Complex> charpoly(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k <= N; ++k)
    charpoly[static_cast<std::size_t>(N - k)] = (k % 2 == 0 ? 1.0 : -1.0) *
                                                esym[static_cast<std::size_t>(k)];

  r.eigenvalues = polynomial_roots(charpoly);
  r.expected_roots = sigma_of_kernel(kernel).roots;

  std::vector<bool> used(r.eigenvalues.size(), false);
  for (const Complex& want : r.expected_roots) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
      if (used[i]) continue;
      const double d = std::abs(r.eigenvalues[i] - want);
      if (d < best) {
        best = d;
        bi = i;
      }
    }
    if (bi < used.size()) used[bi] = true;
    r.max_mismatch = std::max(r.max_mismatch, best);
  }

  r.S = ComplexMatrix(N);
  const auto& roots = r.expected_roots;
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N && i < static_cast<int>(roots.size()); ++i)
      r.S(k, i) = 1.0 / (roots[static_cast<std::size_t>(i)] +
                         terms[static_cast<std::size_t>(k)].alpha + 1.0);
  const ComplexMatrix Sinv = solve(r.S, ComplexMatrix::identity(N));
  r.s_condition = spectral_norm(r.S) * spectral_norm(Sinv);
  return r;
}

double diagonalized_step_norm(const MonomialKernel& kernel, std::int64_t p) {
  const EigenReport er = eigen_check(kernel);
  const int N = er.S.n;
  const ComplexMatrix Sinv = solve(er.S, ComplexMatrix::identity(N));
  const ComplexMatrix Mp = transition_matrix(kernel, p).entries;
  return spectral_norm(Sinv * Mp * er.S);
}

}  // namespace recurflow
