#pragma once

// JSON serialization of the report types (nlohmann::json) plus the RunConfig
// shared by the CLI subcommands.  All emitters are deterministic: object keys
// are sorted and doubles round-trip exactly.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "recurflow/kernel.hpp"
#include "recurflow/linear.hpp"
#include "recurflow/recurrence.hpp"
#include "recurflow/verify.hpp"

namespace recurflow {

struct RunConfig {
  std::vector<double> f_coeffs;             // lowest degree first
  std::int64_t P = 1000;                    // horizon, >= 2
  Precision precision = Precision::kDouble;
  std::uint64_t seed = 12345;               // randomized suites only
  std::string output_dir = ".";
  std::vector<std::string> checks;          // empty = all known checks
  std::pair<std::int64_t, std::int64_t> fit_range{0, 0};  // {0,0} = automatic
  std::map<std::string, double> thresholds;

  EngineConfig engine() const;
};

// Validates P >= 2, fit_range within [2, P], and that every check name is
// known; throws ConfigError otherwise.
RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json run_config_json(const RunConfig& cfg);

// Stable fingerprint of the fields that determine the simulation trace
// (f_coeffs bit patterns, P, precision); used to reuse cached trace.csv.
std::string trace_cache_key(const RunConfig& cfg);

nlohmann::json spectrum_json(const Spectrum& s);
nlohmann::json assumption_json(const AssumptionReport& r);
nlohmann::json decay_fit_json(const DecayFit& f);
nlohmann::json moment_json(const MomentState& m);   // summary fields only
nlohmann::json scan_json(const ScanReport& r);
nlohmann::json eigen_json(const EigenReport& r);
nlohmann::json appendix_json(const AppendixReport& r);
nlohmann::json verification_json(const VerificationReport& r);

// summary.json payload of cmd_simulate.
nlohmann::json summary_json(double x_star, double err_bound, double alpha_f,
                            double fitted_exponent, double sup_Cp);

}  // namespace recurflow
