#include "recurflow/json_io.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

#include "recurflow/errors.hpp"

namespace recurflow {

namespace {

nlohmann::json complex_json(const std::complex<double>& z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

std::string precision_name(Precision p) {
  return p == Precision::kDoubleDouble ? "double-double" : "double";
}

Precision precision_from_name(const std::string& s) {
  if (s == "double") return Precision::kDouble;
  if (s == "double-double" || s == "dd") return Precision::kDoubleDouble;
  throw ConfigError("unknown precision: " + s + " (want double | double-double)");
}

}  // namespace

EngineConfig RunConfig::engine() const {
  EngineConfig e;
  e.P = P;
  e.precision = precision;
  return e;
}

RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "f_coeffs") {
      cfg.f_coeffs = value.get<std::vector<double>>();
    } else if (key == "P") {
      cfg.P = value.get<std::int64_t>();
    } else if (key == "precision") {
      cfg.precision = precision_from_name(value.get<std::string>());
    } else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "output_dir") {
      cfg.output_dir = value.get<std::string>();
    } else if (key == "checks") {
      cfg.checks = value.get<std::vector<std::string>>();
    } else if (key == "fit_range") {
      if (!value.is_array() || value.size() != 2)
        throw ConfigError("fit_range must be [p_min, p_max]");
      cfg.fit_range = {value[0].get<std::int64_t>(), value[1].get<std::int64_t>()};
    } else if (key == "thresholds") {
      for (const auto& [name, v] : value.items())
        cfg.thresholds[name] = v.get<double>();
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  if (cfg.P < 2) throw ConfigError("config requires P >= 2");
  if (cfg.fit_range != std::pair<std::int64_t, std::int64_t>{0, 0}) {
    if (cfg.fit_range.first < 2 || cfg.fit_range.second > cfg.P ||
        cfg.fit_range.first > cfg.fit_range.second)
      throw ConfigError("fit_range must lie within [2, P]");
  }
  const auto& known = known_check_names();
  for (const auto& name : cfg.checks)
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw ConfigError("unknown check name: " + name);
  return cfg;
}

nlohmann::json run_config_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["f_coeffs"] = cfg.f_coeffs;
  j["P"] = cfg.P;
  j["precision"] = precision_name(cfg.precision);
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["checks"] = cfg.checks;
  j["fit_range"] = nlohmann::json::array({cfg.fit_range.first, cfg.fit_range.second});
  j["thresholds"] = cfg.thresholds;
  return j;
}

std::string trace_cache_key(const RunConfig& cfg) {
  // FNV-1a over the exact bit patterns so the key is stable across runs and
  // insensitive to formatting.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  for (double c : cfg.f_coeffs) {
    std::uint64_t bits;
    std::memcpy(&bits, &c, sizeof(bits));
    mix(&bits, sizeof(bits));
  }
  mix(&cfg.P, sizeof(cfg.P));
  const std::uint64_t prec = cfg.precision == Precision::kDoubleDouble ? 2 : 1;
  mix(&prec, sizeof(prec));
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

nlohmann::json spectrum_json(const Spectrum& s) {
  nlohmann::json j;
  nlohmann::json roots = nlohmann::json::array();
  for (const auto& z : s.roots) roots.push_back(complex_json(z));
  j["roots"] = roots;
  j["sigma_G"] = s.sigma_G;
  j["alpha_f"] = s.alpha_f;
  j["distinct"] = s.distinct;
  j["in_strip"] = s.in_strip;
  j["max_residual"] = s.max_residual;
  return j;
}

nlohmann::json assumption_json(const AssumptionReport& r) {
  nlohmann::json j;
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : r.items)
    items.push_back({{"name", it.name},
                     {"pass", it.pass},
                     {"measured", it.measured},
                     {"expected", it.expected}});
  j["items"] = items;
  j["all_pass"] = r.all_pass;
  j["g_integral"] = r.g_integral;
  j["g_integral_closed_form"] = r.g_integral_closed_form;
  j["g_integral_matches_closed_form"] = r.g_integral_matches_closed_form;
  j["g_integral_is_minus_one"] = r.g_integral_is_minus_one;
  return j;
}

nlohmann::json decay_fit_json(const DecayFit& f) {
  nlohmann::json j;
  j["exponent"] = f.exponent;
  j["amplitude"] = f.amplitude;
  j["log_period"] = f.log_period;  // NaN serializes as null
  j["residual"] = f.residual;
  j["p_min"] = f.p_min;
  j["p_max"] = f.p_max;
  return j;
}

nlohmann::json moment_json(const MomentState& m) {
  nlohmann::json j;
  j["n_roots"] = m.N;
  j["reconstruction_residual"] = m.reconstruction_residual;
  j["sup_B_tilde_norm"] = m.sup_B_tilde_norm;
  nlohmann::json fin = nlohmann::json::array();
  for (int k = 0; k < m.N; ++k)
    fin.push_back(complex_json(m.B_tilde[static_cast<std::size_t>(k)].back()));
  j["b_tilde_final"] = fin;
  return j;
}

nlohmann::json scan_json(const ScanReport& r) {
  nlohmann::json j;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries) {
    nlohmann::json profile = nlohmann::json::array();
    for (const auto& [p, norm] : e.profile)
      profile.push_back(nlohmann::json::array({p, norm}));
    entries.push_back({{"q0", e.q0},
                       {"sup_norm", e.sup_norm},
                       {"plateau_detected", e.plateau_detected},
                       {"profile", profile}});
  }
  j["entries"] = entries;
  j["overall_sup"] = r.overall_sup;
  return j;
}

nlohmann::json eigen_json(const EigenReport& r) {
  nlohmann::json j;
  nlohmann::json mt = nlohmann::json::array();
  for (int k = 0; k < r.m_tilde.n; ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (int l = 0; l < r.m_tilde.n; ++l) row.push_back(complex_json(r.m_tilde(k, l)));
    mt.push_back(row);
  }
  j["m_tilde"] = mt;
  nlohmann::json eig = nlohmann::json::array();
  for (const auto& z : r.eigenvalues) eig.push_back(complex_json(z));
  j["eigenvalues"] = eig;
  nlohmann::json exp = nlohmann::json::array();
  for (const auto& z : r.expected_roots) exp.push_back(complex_json(z));
  j["expected_roots"] = exp;
  j["max_mismatch"] = r.max_mismatch;
  j["s_condition"] = r.s_condition;
  return j;
}

nlohmann::json appendix_json(const AppendixReport& r) {
  nlohmann::json j;
  nlohmann::json results = nlohmann::json::array();
  for (const auto& q : r.results)
    results.push_back({{"name", q.name},
                       {"samples", q.samples},
                       {"failures", q.failures},
                       {"worst_margin", q.worst_margin},
                       {"witness", q.witness},
                       {"pass", q.pass}});
  j["results"] = results;
  j["all_pass"] = r.all_pass;
  return j;
}

nlohmann::json verification_json(const VerificationReport& r) {
  nlohmann::json j;
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& c : r.checks)
    checks[c.name] = {{"pass", c.pass},
                      {"measured_constant", c.measured_constant},
                      {"threshold", c.threshold},
                      {"worst_p", c.worst_p},
                      {"details", c.details}};
  j["checks"] = checks;
  j["all_pass"] = r.all_pass;
  return j;
}

nlohmann::json summary_json(double x_star, double err_bound, double alpha_f,
                            double fitted_exponent, double sup_Cp) {
  nlohmann::json j;
  j["x_star"] = x_star;
  j["err_bound"] = err_bound;
  j["alpha_f"] = alpha_f;
  j["fitted_exponent"] = fitted_exponent;
  j["sup_Cp"] = sup_Cp;
  return j;
}

}  // namespace recurflow
