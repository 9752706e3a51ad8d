#include "recurflow/recurrence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "recurflow/errors.hpp"
#include "recurflow/kernel.hpp"

namespace recurflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Scalar operations shared by the double and double-double engines.
template <typename T>
struct Ops;

template <>
struct Ops<double> {
  static double from_ratio(std::int64_t a, std::int64_t b) {
    return static_cast<double>(a) / static_cast<double>(b);
  }
  static double ldexp(double v, int k) { return std::ldexp(v, k); }
  static DoubleDouble log_abs(double v) {
    // The mantissa itself carries double rounding; keeping the log in
    // double-double costs nothing and preserves the exact-exponent assembly.
    return DoubleDouble(std::log(std::fabs(v)));
  }
  static double hi(double v) { return v; }
};

template <>
struct Ops<DoubleDouble> {
  static DoubleDouble from_ratio(std::int64_t a, std::int64_t b) {
    return DoubleDouble(static_cast<double>(a)) / DoubleDouble(static_cast<double>(b));
  }
  static DoubleDouble ldexp(const DoubleDouble& v, int k) { return dd_ldexp(v, k); }
  static DoubleDouble log_abs(const DoubleDouble& v) { return dd_log(dd_abs(v)); }
  static double hi(const DoubleDouble& v) { return v.hi; }
};

template <typename T>
T eval_poly(const std::vector<double>& c, const T& x) {
  T r{0.0};
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + T{*it};
  return r;
}

// Running sum of scaled terms; exponents are aligned by exact power-of-two
// shifts, so the only rounding is in the mantissa additions.
template <typename T>
struct ScaledAccumulator {
  T m{0.0};
  std::int64_t e = 0;
  bool empty = true;

  void add(T tm, std::int64_t te) {
    if (Ops<T>::hi(tm) == 0.0) return;
    if (empty) {
      m = tm;
      e = te;
      empty = false;
    } else {
      const std::int64_t d = te - e;
      if (d > 1100) {  // accumulator is negligible next to the new term
        m = tm;
        e = te;
      } else if (d > 0) {
        m = Ops<T>::ldexp(m, static_cast<int>(-d)) + tm;
        e = te;
      } else if (d >= -1100) {
        m = m + Ops<T>::ldexp(tm, static_cast<int>(d));
      }  // else the term vanishes below the accumulator's precision
    }
    renormalize();
  }

  void add(const Scaled<T>& s) {
    if (!s.is_zero()) add(s.mantissa, s.exponent);
  }

  void renormalize() {
    const double h = Ops<T>::hi(m);
    if (h == 0.0) {
      empty = true;
      e = 0;
      return;
    }
    int ei = 0;
    std::frexp(h, &ei);
    const int shift = ei - 1;
    if (shift != 0) {
      m = Ops<T>::ldexp(m, -shift);
      e += shift;
    }
  }

  Scaled<T> result() const { return empty ? Scaled<T>{} : Scaled<T>{m, e}; }
};

template <typename T>
Scaled<T> scaled_one() {
  return Scaled<T>{T{1.0}, 0};
}

int resolve_threads(const EngineConfig& cfg) {
  if (!cfg.parallel) return 1;
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("RECURFLOW_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// One convolution chunk: sum over p1 in [lo, hi) of f~(p1/p) c_{p1} c_{p-p1}.
// Chunk boundaries are fixed (independent of thread count), and chunks are
// combined in index order, so results are bit-identical serial or parallel.
template <typename T>
Scaled<T> convolve_chunk(const std::vector<Scaled<T>>& c,
                         const std::vector<double>& ft_coeffs, std::int64_t p,
                         std::int64_t lo, std::int64_t hi) {
  ScaledAccumulator<T> acc;
  for (std::int64_t p1 = lo; p1 < hi; ++p1) {
    const Scaled<T>& x = c[static_cast<std::size_t>(p1)];
    const Scaled<T>& y = c[static_cast<std::size_t>(p - p1)];
    if (x.is_zero() || y.is_zero()) continue;
    const T w = eval_poly<T>(ft_coeffs, Ops<T>::from_ratio(p1, p));
    acc.add(w * x.mantissa * y.mantissa, x.exponent + y.exponent);
  }
  return acc.result();
}

template <typename T>
void fill_trace(const RealPolynomial& f, const EngineConfig& cfg, RecurrenceTrace& t) {
  const std::int64_t P = cfg.P;
  const std::vector<double> ft_coeffs = symmetrize(f).coeffs();
  const double f_half = f.eval(0.5);

  std::vector<Scaled<T>> c(static_cast<std::size_t>(P) + 1);
  c[1] = scaled_one<T>();
  std::int64_t pow2_offset = 0;

  const int threads = resolve_threads(cfg);
  constexpr std::int64_t kChunk = 2048;
  std::vector<Scaled<T>> partials;

  for (std::int64_t p = 2; p <= P; ++p) {
    // Pair p1 with p - p1: the pair weight is f(p1/p) + f(1 - p1/p) = f~(p1/p);
    // an even p adds the unpaired middle term f(1/2) c_{p/2}^2.
    const std::int64_t half = (p - 1) / 2;  // p1 ranges over [1, half]
    ScaledAccumulator<T> sum;

    const std::int64_t nchunks = (half + kChunk - 1) / kChunk;
    if (threads > 1 && nchunks > 1) {
      partials.assign(static_cast<std::size_t>(nchunks), Scaled<T>{});
      std::vector<std::thread> pool;
      for (int w = 0; w < std::min<std::int64_t>(threads, nchunks); ++w) {
        pool.emplace_back([&, w]() {
          for (std::int64_t k = w; k < nchunks; k += threads) {
            const std::int64_t lo = 1 + k * kChunk;
            const std::int64_t hi = std::min<std::int64_t>(half + 1, lo + kChunk);
            partials[static_cast<std::size_t>(k)] =
                convolve_chunk<T>(c, ft_coeffs, p, lo, hi);
          }
        });
      }
      for (auto& th : pool) th.join();
      for (const auto& s : partials) sum.add(s);
    } else {
      for (std::int64_t k = 0; k < nchunks; ++k) {
        const std::int64_t lo = 1 + k * kChunk;
        const std::int64_t hi = std::min<std::int64_t>(half + 1, lo + kChunk);
        sum.add(convolve_chunk<T>(c, ft_coeffs, p, lo, hi));
      }
    }

    if (p % 2 == 0 && f_half != 0.0) {
      const Scaled<T>& m = c[static_cast<std::size_t>(p / 2)];
      if (!m.is_zero())
        sum.add(T{f_half} * m.mantissa * m.mantissa, 2 * m.exponent);
    }

    Scaled<T> cp = sum.result();
    if (!cp.is_zero()) {
      cp.mantissa = cp.mantissa * Ops<T>::from_ratio(1, p);
      cp.normalize();
    }
    if (Ops<T>::hi(cp.mantissa) <= 0.0)
      throw SignDegeneracy("c_p <= 0 at p = " + std::to_string(p) +
                               "; positive normalizer a_p is undefined",
                           p);
    c[static_cast<std::size_t>(p)] = cp;

    // Degree-homogeneous rescale c_q <- c_q 2^{-kq}: exponents stay bounded
    // and every downstream log picks the offset back up exactly.
    if (std::llabs(cp.exponent) > cfg.renorm_threshold) {
      const std::int64_t k =
          std::llround(static_cast<double>(cp.exponent) / static_cast<double>(p));
      if (k != 0) {
        for (std::int64_t q = 1; q <= p; ++q)
          c[static_cast<std::size_t>(q)].exponent -= q * k;
        pow2_offset += k;
      }
    }
  }

  t.P = P;
  t.precision = cfg.precision;
  t.f = f;
  t.pow2_offset = pow2_offset;
  t.scale_offset = (dd_constants::ln2 * static_cast<double>(pow2_offset)).to_double();
  t.xi_limit = (cfg.precision == Precision::kDouble) ? std::min<std::int64_t>(P, 4096) : P;

  t.c.assign(static_cast<std::size_t>(P) + 1, ScaledReal{});
  t.log_c_dd.assign(static_cast<std::size_t>(P) + 1, DoubleDouble(0.0));
  t.log_c.assign(static_cast<std::size_t>(P) + 1, kNaN);
  t.a.assign(static_cast<std::size_t>(P) + 1, kNaN);
  t.xi.assign(static_cast<std::size_t>(P) + 1, kNaN);
  t.delta.assign(static_cast<std::size_t>(P) + 1, kNaN);

  std::vector<DoubleDouble> log_m(static_cast<std::size_t>(P) + 1, DoubleDouble(0.0));
  for (std::int64_t p = 1; p <= P; ++p) {
    const Scaled<T>& s = c[static_cast<std::size_t>(p)];
    ScaledReal sr{};
    if (!s.is_zero()) {
      if constexpr (std::is_same_v<T, DoubleDouble>)
        sr = ScaledReal{s.mantissa.to_double(), s.exponent};
      else
        sr = ScaledReal{s.mantissa, s.exponent};
      sr.normalize();
    }
    t.c[static_cast<std::size_t>(p)] = sr;

    log_m[static_cast<std::size_t>(p)] = Ops<T>::log_abs(s.mantissa);
    // True log c_p: mantissa log plus the exact power-of-two bookkeeping.
    const std::int64_t e_true = s.exponent + p * pow2_offset;
    const DoubleDouble L =
        log_m[static_cast<std::size_t>(p)] + dd_constants::ln2 * static_cast<double>(e_true);
    t.log_c_dd[static_cast<std::size_t>(p)] = L;
    t.log_c[static_cast<std::size_t>(p)] = L.to_double();
    t.a[static_cast<std::size_t>(p)] =
        std::exp(-(L / DoubleDouble(static_cast<double>(p))).to_double());
  }

  for (std::int64_t p = 2; p <= t.xi_limit; ++p) {
    const auto& sp = c[static_cast<std::size_t>(p)];
    const auto& sq = c[static_cast<std::size_t>(p - 1)];
    // Delta_p = log a_p - log a_{p-1}; the integer combination
    // n = p e_{p-1} - (p-1) e_p makes the exponent parts cancel exactly
    // (n is invariant under the rescale, which shifts e_q by -kq).
    const std::int64_t n = p * sq.exponent - (p - 1) * sp.exponent;
    const DoubleDouble dn = dd_constants::ln2 * static_cast<double>(n);
    const double pp1 = static_cast<double>(p) * static_cast<double>(p - 1);
    DoubleDouble delta = log_m[static_cast<std::size_t>(p - 1)] /
                             DoubleDouble(static_cast<double>(p - 1)) -
                         log_m[static_cast<std::size_t>(p)] /
                             DoubleDouble(static_cast<double>(p)) +
                         dn / DoubleDouble(pp1);
    const double p3 = static_cast<double>(p) * static_cast<double>(p) * static_cast<double>(p);
    t.xi[static_cast<std::size_t>(p)] = p3 * std::expm1(delta.to_double());
  }
}

}  // namespace

double RecurrenceTrace::log_lambda(std::int64_t p, double x) const {
  return log_c[static_cast<std::size_t>(p)] + static_cast<double>(p) * std::log(x);
}

RecurrenceTrace run_recurrence(const RealPolynomial& f, const EngineConfig& cfg) {
  if (cfg.P < 2) throw ConfigError("EngineConfig.P must be >= 2");
  if (cfg.renorm_threshold < 64)
    throw ConfigError("EngineConfig.renorm_threshold must be >= 64");

  RecurrenceTrace t;
  t.assumption_warning = std::abs(f.integral01() - 1.0) > 1e-12 ||
                         std::abs(symmetrize(f).integral01() - 2.0) > 1e-12;
  if (cfg.precision == Precision::kDouble)
    fill_trace<double>(f, cfg, t);
  else
    fill_trace<DoubleDouble>(f, cfg, t);
  return t;
}

std::vector<Rational> oracle_recurrence(const RealPolynomial& f, std::int64_t P) {
  if (P < 1 || P > 16) throw ConfigError("oracle_recurrence requires 1 <= P <= 16");
  std::vector<Rational> fc;
  for (double a : f.coeffs()) fc.push_back(Rational::from_double(a));

  std::vector<Rational> c(static_cast<std::size_t>(P) + 1, Rational(0));
  c[1] = Rational(1);
  for (std::int64_t p = 2; p <= P; ++p) {
    Rational s(0);
    for (std::int64_t p1 = 1; p1 < p; ++p1)
      s = s + rational_polyval(fc, Rational(p1, p)) * c[static_cast<std::size_t>(p1)] *
                  c[static_cast<std::size_t>(p - p1)];
    c[static_cast<std::size_t>(p)] = s / Rational(p);
  }
  return c;
}

std::pair<double, double> estimate_x_star(RecurrenceTrace& trace) {
  if (trace.P < 100) throw InsufficientHorizon("estimate_x_star requires P >= 100");
  const std::int64_t P = trace.P;
  const std::int64_t q_hi = trace.xi_limit;
  const std::int64_t q_lo = q_hi / 2 + 1;

  const DoubleDouble log_aP_dd =
      trace.log_c_dd[static_cast<std::size_t>(P)] / DoubleDouble(-static_cast<double>(P));

  double sup = 0.0;
  for (std::int64_t q = q_lo; q <= q_hi; ++q) {
    const double v = trace.xi[static_cast<std::size_t>(q)];
    if (std::isfinite(v)) sup = std::max(sup, std::fabs(v));
  }

  double tail = 0.0;
  if (sup > 0.0) {
    // Model xi_q ~ Re(A q^sigma) with sigma from the characteristic spectrum
    // (empirical fallback when the spectrum is unavailable), fitted by least
    // squares on the last resolved octave.
    std::complex<double> sigma;
    bool have_sigma = false;
    try {
      const Spectrum s = characteristic_spectrum(symmetrize(trace.f));
      sigma = s.roots.front();  // max Re, nonnegative Im by sort order
      have_sigma = true;
    } catch (const Error&) {
    }
    if (!have_sigma) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
      for (std::int64_t q = q_lo; q <= q_hi; ++q) {
        const double v = std::fabs(trace.xi[static_cast<std::size_t>(q)]);
        if (!(v > 0.0) || !std::isfinite(v)) continue;
        const double lx = std::log(static_cast<double>(q)), ly = std::log(v);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly; n += 1;
      }
      const double det = n * sxx - sx * sx;
      sigma = std::complex<double>(det != 0.0 ? (n * sxy - sx * sy) / det : -0.5, 0.0);
    }

    double suu = 0, suv = 0, svv = 0, su = 0, sv = 0;
    for (std::int64_t q = q_lo; q <= q_hi; ++q) {
      const double v = trace.xi[static_cast<std::size_t>(q)];
      if (!std::isfinite(v)) continue;
      const std::complex<double> qs = std::exp(sigma * std::log(static_cast<double>(q)));
      const double u1 = qs.real(), u2 = -qs.imag();
      suu += u1 * u1; suv += u1 * u2; svv += u2 * u2;
      su += u1 * v; sv += u2 * v;
    }
    const double det = suu * svv - suv * suv;
    std::complex<double> A;
    if (std::fabs(det) > 1e-14 * (suu * svv + 1e-300))
      A = std::complex<double>((su * svv - sv * suv) / det, (sv * suu - su * suv) / det);
    else
      A = std::complex<double>(suu > 0.0 ? su / suu : 0.0, 0.0);

    // Euler-Maclaurin: sum_{q > P} q^{sigma-3} ~ (P + 1/2)^{sigma-2} / (2 - sigma).
    const std::complex<double> tail_c =
        A * std::exp((sigma - 2.0) * std::log(static_cast<double>(P) + 0.5)) /
        (2.0 - sigma);
    tail = tail_c.real();
  }

  const DoubleDouble log_x_dd = log_aP_dd + DoubleDouble(tail);
  trace.x_star = std::exp(log_x_dd.to_double());
  trace.err_bound = std::fabs(trace.x_star * tail);
  for (std::int64_t p = 1; p <= P; ++p) {
    const DoubleDouble ex =
        log_x_dd * static_cast<double>(p) + trace.log_c_dd[static_cast<std::size_t>(p)];
    trace.delta[static_cast<std::size_t>(p)] = std::expm1(ex.to_double());
  }
  trace.x_star_estimated = true;
  return {trace.x_star, trace.err_bound};
}

RResult compute_R(const RecurrenceTrace& trace, double x) {
  if (x == 0.0) throw ZeroInput("compute_R requires x != 0");
  if (!trace.x_star_estimated)
    throw InsufficientData("compute_R requires an estimated x*; run estimate_x_star first");
  const double alpha_f = characteristic_spectrum(symmetrize(trace.f)).alpha_f;

  RResult r;
  r.R = x / trace.x_star;
  r.Cp_seq.assign(static_cast<std::size_t>(trace.P) + 1, kNaN);
  // Lambda_p(x)/R^p = c_p x^p (x*/x)^p = c_p (x*)^p = 1 + delta_p: the x
  // dependence cancels by homogeneity, so Cp_seq is delta_p p^{alpha_f}.
  for (std::int64_t p = 1; p <= trace.P; ++p)
    r.Cp_seq[static_cast<std::size_t>(p)] =
        trace.delta[static_cast<std::size_t>(p)] *
        std::pow(static_cast<double>(p), alpha_f);
  return r;
}

void export_trace_csv(const RecurrenceTrace& trace, std::ostream& out) {
  out << "p,log_c,a_p,xi_p,delta_p\n";
  out << std::setprecision(17);
  for (std::int64_t p = 1; p <= trace.P; ++p) {
    const auto i = static_cast<std::size_t>(p);
    out << p << ',' << trace.log_c[i] << ',' << trace.a[i] << ',' << trace.xi[i] << ','
        << trace.delta[i] << '\n';
  }
}

RecurrenceTrace import_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("p,log_c,a_p,xi_p,delta_p", 0) != 0)
    throw ConfigError("trace CSV must start with header p,log_c,a_p,xi_p,delta_p");

  // Stream extraction cannot read "nan"/"inf", which legitimately appear
  // (xi_1 is undefined), so parse each field with from_chars/strtod.
  const auto parse_double = [](const std::string& tok, double& out) {
    const char* b = tok.c_str();
    char* end = nullptr;
    out = std::strtod(b, &end);
    return end == b + tok.size() && !tok.empty();
  };
  std::vector<std::array<double, 4>> rows;
  std::vector<std::int64_t> ps;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> fields;
    while (std::getline(ls, tok, ',')) fields.push_back(tok);
    std::array<double, 4> row{};
    std::int64_t p = 0;
    bool ok = fields.size() == 5;
    if (ok) {
      const char* b = fields[0].c_str();
      char* end = nullptr;
      p = std::strtoll(b, &end, 10);
      ok = end == b + fields[0].size() && p >= 1;
    }
    for (std::size_t k = 0; ok && k < 4; ++k) ok = parse_double(fields[k + 1], row[k]);
    if (!ok) throw ConfigError("malformed trace CSV row: " + line);
    ps.push_back(p);
    rows.push_back(row);
  }
  if (ps.empty()) throw ConfigError("trace CSV has no data rows");

  RecurrenceTrace t;
  t.P = *std::max_element(ps.begin(), ps.end());
  t.log_c_dd.assign(static_cast<std::size_t>(t.P) + 1, DoubleDouble(0.0));
  t.log_c.assign(static_cast<std::size_t>(t.P) + 1, kNaN);
  t.a.assign(static_cast<std::size_t>(t.P) + 1, kNaN);
  t.xi.assign(static_cast<std::size_t>(t.P) + 1, kNaN);
  t.delta.assign(static_cast<std::size_t>(t.P) + 1, kNaN);
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const auto i = static_cast<std::size_t>(ps[k]);
    t.log_c[i] = rows[k][0];
    t.log_c_dd[i] = DoubleDouble(rows[k][0]);
    t.a[i] = rows[k][1];
    t.xi[i] = rows[k][2];
    t.delta[i] = rows[k][3];
  }
  t.xi_limit = 0;
  for (std::int64_t p = t.P; p >= 2; --p)
    if (std::isfinite(t.xi[static_cast<std::size_t>(p)])) {
      t.xi_limit = p;
      break;
    }
  return t;
}

}  // namespace recurflow
