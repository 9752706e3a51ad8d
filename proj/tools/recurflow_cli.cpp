// Command-line front end: spectrum / simulate / linear / stability / verify.
// Exit codes: 0 = success, 1 = error, 2 = check failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "recurflow/errors.hpp"
#include "recurflow/json_io.hpp"
#include "recurflow/kernel.hpp"
#include "recurflow/linear.hpp"
#include "recurflow/recurrence.hpp"
#include "recurflow/verify.hpp"

namespace rf = recurflow;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, sep)) out.push_back(tok);
  return out;
}

std::vector<double> parse_coeffs(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw rf::ConfigError("bad coefficient: " + tok);
    }
    if (used != tok.size()) throw rf::ConfigError("bad coefficient: " + tok);
    out.push_back(v);
  }
  if (out.empty()) throw rf::ConfigError("empty coefficient list");
  return out;
}

// "alpha:C" pairs, comma-joined, e.g. "0:-4,1:6".
rf::MonomialKernel parse_kernel(const std::string& s) {
  rf::MonomialKernel k;
  for (const auto& tok : split(s, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos)
      throw rf::ConfigError("kernel term must be alpha:C, got " + tok);
    const std::vector<double> pair = {parse_coeffs(tok.substr(0, colon))[0],
                                      parse_coeffs(tok.substr(colon + 1))[0]};
    k.terms.push_back({std::complex<double>(pair[1], 0.0),
                       std::complex<double>(pair[0], 0.0)});
  }
  if (k.terms.empty()) throw rf::ConfigError("empty kernel");
  return k;
}

rf::Precision parse_precision(const std::string& s) {
  if (s == "double") return rf::Precision::kDouble;
  if (s == "double-double" || s == "dd") return rf::Precision::kDoubleDouble;
  throw rf::ConfigError("unknown precision: " + s + " (want double | double-double)");
}

void write_json(const std::string& dir, const std::string& name,
                const nlohmann::json& j) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw rf::ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Per-subcommand option bundle; unset values fall back to --config, then to
// the RunConfig defaults.
struct Opts {
  std::string config_path;
  std::string f_str;
  std::string kernel_str;
  std::string precision_str;
  std::string checks_str;
  std::string output_dir;
  std::string q0_str = "2,10,100";
  std::int64_t P = 0;
  std::vector<std::int64_t> fit_range;
  double xi2 = 8.0;
  double h_power = 0.0;
  bool forced = false;
  int threads = 0;
};

void add_common(CLI::App* sub, Opts& o, bool wants_f) {
  sub->add_option("--config", o.config_path, "JSON config file mirroring RunConfig");
  if (wants_f)
    sub->add_option("--f", o.f_str, "weight coefficients, lowest degree first (e.g. 4,-10,6)");
  sub->add_option("--P", o.P, "horizon");
  sub->add_option("--precision", o.precision_str, "double | double-double");
  sub->add_option("--output-dir", o.output_dir, "directory for JSON/CSV artifacts");
  sub->add_option("--fit-range", o.fit_range, "fit range p_min p_max")->expected(2);
  sub->add_option("--threads", o.threads, "worker threads (0 = RECURFLOW_THREADS/auto)");
}

bool given(const CLI::App* sub, const std::string& name) {
  const CLI::Option* opt = sub->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

rf::RunConfig resolve(const CLI::App* sub, const Opts& o) {
  rf::RunConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw rf::ConfigError("cannot open config: " + o.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw rf::ConfigError(std::string("bad config JSON: ") + e.what());
    }
    cfg = rf::parse_run_config(j);
  }
  if (given(sub, "--f")) cfg.f_coeffs = parse_coeffs(o.f_str);
  if (given(sub, "--P")) cfg.P = o.P;
  if (given(sub, "--precision")) cfg.precision = parse_precision(o.precision_str);
  if (given(sub, "--output-dir")) cfg.output_dir = o.output_dir;
  if (given(sub, "--checks")) cfg.checks = split(o.checks_str, ',');
  if (given(sub, "--fit-range")) cfg.fit_range = {o.fit_range[0], o.fit_range[1]};
  // Re-validate the merged config (range bounds, known check names).
  return rf::parse_run_config(rf::run_config_json(cfg));
}

rf::RealPolynomial require_f(const rf::RunConfig& cfg) {
  if (cfg.f_coeffs.empty()) throw rf::ConfigError("--f (or config f_coeffs) is required");
  return rf::RealPolynomial{cfg.f_coeffs};
}

rf::MonomialKernel resolve_kernel(const Opts& o, const rf::RunConfig& cfg) {
  if (!o.kernel_str.empty()) return parse_kernel(o.kernel_str);
  if (!cfg.f_coeffs.empty())
    return rf::to_monomials(rf::kernel_G(rf::symmetrize(require_f(cfg))));
  throw rf::ConfigError("--kernel or --f is required");
}

std::pair<std::int64_t, std::int64_t> fit_window(const rf::RunConfig& cfg) {
  if (cfg.fit_range != std::pair<std::int64_t, std::int64_t>{0, 0}) return cfg.fit_range;
  return {std::max<std::int64_t>(16, cfg.P / 32), cfg.P};
}

double threshold_or(const rf::RunConfig& cfg, const std::string& name, double fallback) {
  const auto it = cfg.thresholds.find(name);
  return it == cfg.thresholds.end() ? fallback : it->second;
}

int cmd_spectrum(const rf::RunConfig& cfg) {
  const rf::RealPolynomial f = require_f(cfg);
  const rf::Spectrum s = rf::characteristic_spectrum(rf::symmetrize(f));
  nlohmann::json j = rf::spectrum_json(s);
  j["assumptions"] = rf::assumption_json(rf::validate_assumption(f));
  write_json(cfg.output_dir, "spectrum.json", j);
  std::cout << j.dump(2) << '\n';
  return (s.distinct && s.in_strip) ? 0 : 2;
}

int cmd_simulate(const rf::RunConfig& cfg, int threads) {
  const rf::RealPolynomial f = require_f(cfg);
  rf::EngineConfig ecfg = cfg.engine();
  ecfg.parallel = threads != 1;
  ecfg.threads = threads;
  rf::RecurrenceTrace trace = rf::run_recurrence(f, ecfg);

  nlohmann::json summary;
  double sup_cp = std::numeric_limits<double>::quiet_NaN();
  double fitted = std::numeric_limits<double>::quiet_NaN();
  if (cfg.P >= 100) {
    rf::estimate_x_star(trace);
    const auto [lo, hi] = fit_window(cfg);
    try {
      fitted = rf::fit_decay(trace.delta, lo, hi, true).exponent;
    } catch (const rf::InsufficientData&) {
    }
    const rf::RResult rr = rf::compute_R(trace, trace.x_star);
    sup_cp = 0.0;
    for (double v : rr.Cp_seq)
      if (std::isfinite(v)) sup_cp = std::max(sup_cp, std::fabs(v));
  }
  const double alpha_f = rf::characteristic_spectrum(rf::symmetrize(f)).alpha_f;
  summary = rf::summary_json(trace.x_star_estimated
                                 ? trace.x_star
                                 : std::numeric_limits<double>::quiet_NaN(),
                             trace.err_bound, alpha_f, fitted, sup_cp);

  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream csv(std::filesystem::path(cfg.output_dir) / "trace.csv");
  rf::export_trace_csv(trace, csv);
  write_json(cfg.output_dir, "summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_linear(const Opts& o, const rf::RunConfig& cfg) {
  const rf::MonomialKernel kernel = resolve_kernel(o, cfg);
  std::vector<double> h;
  if (o.forced) {
    h.assign(static_cast<std::size_t>(cfg.P) + 1, 0.0);
    for (std::int64_t p = 1; p <= cfg.P; ++p)
      h[static_cast<std::size_t>(p)] = std::pow(static_cast<double>(p), -o.h_power);
  }
  const rf::LinearTrace trace = rf::run_linear(kernel, o.xi2, h, cfg.P);
  const rf::MomentState moment = rf::moment_transform(trace);

  nlohmann::json j;
  nlohmann::json kj = nlohmann::json::array();
  for (const auto& t : kernel.terms)
    kj.push_back(nlohmann::json::array({t.alpha.real(), t.coeff.real()}));
  j["kernel"] = kj;
  j["P"] = cfg.P;
  j["xi2"] = o.xi2;
  j["forced"] = o.forced;
  double sup_xi = 0.0;
  for (std::int64_t p = 2; p <= cfg.P; ++p)
    sup_xi = std::max(sup_xi, std::fabs(trace.xi[static_cast<std::size_t>(p)]));
  j["sup_xi"] = sup_xi;
  j["residual"] = rf::linear_residual(trace);
  j["moment"] = rf::moment_json(moment);

  const rf::Spectrum ks = rf::sigma_of_kernel(kernel);
  const bool oscillatory = std::fabs(ks.roots.front().imag()) > 1e-12;
  const auto [lo, hi] = fit_window(cfg);
  try {
    j["fit"] = rf::decay_fit_json(rf::fit_decay(trace.xi, lo, hi, oscillatory));
  } catch (const rf::InsufficientData&) {
    j["fit"] = nullptr;
  }

  write_json(cfg.output_dir, "linear.json", j);
  std::cout << j.dump(2) << '\n';
  const double tol = threshold_or(cfg, "moment_residual", 1e-9);
  return moment.reconstruction_residual <= tol ? 0 : 2;
}

int cmd_stability(const Opts& o, const rf::RunConfig& cfg) {
  const rf::MonomialKernel kernel = resolve_kernel(o, cfg);
  const rf::Spectrum ks = rf::sigma_of_kernel(kernel);
  // Shift the kernel so the leading characteristic root lands on Re = 0; the
  // product norms then stay bounded without decaying, which is the regime the
  // scan certifies.
  const rf::MonomialKernel shifted = rf::shift_kernel(kernel, ks.sigma_G);

  std::vector<std::int64_t> q0s;
  for (const auto& tok : split(o.q0_str, ','))
    q0s.push_back(static_cast<std::int64_t>(std::stoll(tok)));

  const rf::ScanReport scan =
      rf::product_norm_scan(shifted, q0s, cfg.P, threshold_or(cfg, "norm_cap", 1e8));
  const rf::EigenReport eig = rf::eigen_check(kernel);

  nlohmann::json j;
  j["sigma_G"] = ks.sigma_G;
  j["scan"] = rf::scan_json(scan);
  j["eigen"] = rf::eigen_json(eig);
  write_json(cfg.output_dir, "stability.json", j);
  std::cout << j.dump(2) << '\n';

  bool pass = eig.max_mismatch < threshold_or(cfg, "eigen_mismatch", 1e-9);
  for (const auto& e : scan.entries) pass = pass && e.plateau_detected;
  return pass ? 0 : 2;
}

int cmd_verify(const rf::RunConfig& cfg, int threads) {
  const rf::RealPolynomial f = require_f(cfg);
  const std::string key = rf::trace_cache_key(cfg);
  const auto dir = std::filesystem::path(cfg.output_dir);
  const auto csv_path = dir / "trace.csv";
  const auto key_path = dir / "trace.key";

  rf::RecurrenceTrace trace;
  if (std::filesystem::exists(csv_path) && read_text(key_path) == key + "\n") {
    std::ifstream in(csv_path);
    trace = rf::import_trace_csv(in);
    trace.f = f;
    trace.precision = cfg.precision;
    // delta came from the CSV, so the x*-dependent checks stay available.
    trace.x_star_estimated =
        std::isfinite(trace.delta[static_cast<std::size_t>(trace.P)]);
  } else {
    rf::EngineConfig ecfg = cfg.engine();
    ecfg.parallel = threads != 1;
    ecfg.threads = threads;
    trace = rf::run_recurrence(f, ecfg);
    if (cfg.P >= 100) rf::estimate_x_star(trace);
    std::filesystem::create_directories(dir);
    std::ofstream csv(csv_path);
    rf::export_trace_csv(trace, csv);
    std::ofstream keyf(key_path);
    keyf << key << '\n';
  }

  const rf::VerificationReport report = rf::run_verification_suite(trace, f, cfg.checks);
  const nlohmann::json j = rf::verification_json(report);
  write_json(cfg.output_dir, "verify.json", j);
  std::cout << j.dump(2) << '\n';
  return report.all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and analysis of a quadratic convolution recurrence"};
  app.require_subcommand(1);
  int rc = 0;

  Opts so;
  CLI::App* spectrum = app.add_subcommand("spectrum", "characteristic roots and decay exponent");
  add_common(spectrum, so, true);
  spectrum->callback([&] { rc = cmd_spectrum(resolve(spectrum, so)); });

  Opts mo;
  CLI::App* simulate = app.add_subcommand("simulate", "run the recurrence, estimate x*, fit decay");
  add_common(simulate, mo, true);
  simulate->callback([&] { rc = cmd_simulate(resolve(simulate, mo), mo.threads); });

  Opts lo;
  CLI::App* linear = app.add_subcommand("linear", "linearized recurrence, moments, decay fit");
  add_common(linear, lo, true);
  linear->add_option("--kernel", lo.kernel_str, "kernel terms alpha:C, comma-joined");
  linear->add_option("--xi2", lo.xi2, "seed value xi_2");
  linear->add_option("--h-power", lo.h_power, "forcing h_p = p^{-s}");
  linear->callback([&] {
    lo.forced = given(linear, "--h-power");
    rc = cmd_linear(lo, resolve(linear, lo));
  });

  Opts to;
  CLI::App* stability = app.add_subcommand("stability", "transition-matrix product norms and eigenstructure");
  add_common(stability, to, true);
  stability->add_option("--kernel", to.kernel_str, "kernel terms alpha:C, comma-joined");
  stability->add_option("--q0", to.q0_str, "comma-joined start indices");
  stability->callback([&] { rc = cmd_stability(to, resolve(stability, to)); });

  Opts vo;
  CLI::App* verify = app.add_subcommand("verify", "run the named checks against a trace");
  add_common(verify, vo, true);
  verify->add_option("--checks", vo.checks_str, "comma-joined check names (default: all)");
  verify->callback([&] { rc = cmd_verify(resolve(verify, vo), vo.threads); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const rf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
