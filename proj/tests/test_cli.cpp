// End-to-end tests of the command-line driver: exit codes, JSON artifacts,
// determinism, config merging, and trace caching.  The binary path arrives as
// the positional argument (see CMakeLists.txt).

#define DOCTEST_CONFIG_IMPLEMENT
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_base;
int g_case = 0;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Runs the binary inside `dir` and captures stdout/stderr and the exit code.
CliResult run_cli(const std::string& args, const fs::path& dir) {
  fs::create_directories(dir);
  const std::string cmd = "cd '" + dir.string() + "' && '" + g_cli + "' " + args +
                          " > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(dir / "stdout.txt");
  r.err = read_file(dir / "stderr.txt");
  return r;
}

fs::path fresh_dir() {
  fs::path d = g_base / ("case_" + std::to_string(++g_case));
  fs::create_directories(d);
  return d;
}

json parse(const std::string& text) { return json::parse(text); }

// Every key the schema marks as required must be present in the document.
void check_schema_required(const char* schema_file, const json& doc) {
  const fs::path p = fs::path(RECURFLOW_SOURCE_DIR) / "schemas" / schema_file;
  REQUIRE_MESSAGE(fs::exists(p), "missing schema: ", p.string());
  const json schema = parse(read_file(p));
  REQUIRE(schema.contains("required"));
  for (const auto& key : schema.at("required")) {
    CAPTURE(schema_file);
    CAPTURE(key.get<std::string>());
    CHECK(doc.contains(key.get<std::string>()));
  }
}

std::int64_t count_data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::int64_t rows = -1;  // header
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  return rows;
}

}  // namespace

TEST_CASE("spectrum: reference weight, strip membership, exit code 0") {
  const fs::path d = fresh_dir();
  const CliResult r = run_cli("spectrum --f \"4,-10,6\"", d);
  CHECK(r.exit_code == 0);
  const json j = parse(r.out);
  CHECK(parse(read_file(d / "spectrum.json")) == j);
  check_schema_required("spectrum.schema.json", j);

  REQUIRE(j["roots"].size() == 2);
  CHECK(j["roots"][0][0].get<double>() == -0.5);
  CHECK(j["roots"][1][0].get<double>() == -0.5);
  CHECK(j["roots"][0][1].get<double>() ==
        doctest::Approx(std::sqrt(15.0) / 2.0).epsilon(1e-14));
  CHECK(j["alpha_f"].get<double>() == 1.5);
  CHECK(j["sigma_G"].get<double>() == -0.5);
  CHECK(j["distinct"].get<bool>());
  CHECK(j["in_strip"].get<bool>());
  CHECK(j["max_residual"].get<double>() < 1e-12);
  CHECK(j["assumptions"]["all_pass"].get<bool>());
  CHECK(j["assumptions"]["g_integral"].get<double>() == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("spectrum: degenerate weight exits 1 with a message") {
  const CliResult r = run_cli("spectrum --f \"1\"", fresh_dir());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("spectrum: roots outside the strip exit 2") {
  const CliResult r = run_cli("spectrum --f \"0,0,3\"", fresh_dir());
  CHECK(r.exit_code == 2);
  const json j = parse(r.out);
  CHECK(j["distinct"].get<bool>());
  CHECK_FALSE(j["in_strip"].get<bool>());
}

TEST_CASE("simulate: deterministic artifacts and estimated growth rate") {
  const fs::path d1 = fresh_dir(), d2 = fresh_dir();
  const CliResult r1 = run_cli("simulate --f \"4,-10,6\" --P 200", d1);
  const CliResult r2 = run_cli("simulate --f \"4,-10,6\" --P 200", d2);
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(read_file(d1 / "trace.csv") == read_file(d2 / "trace.csv"));
  CHECK(read_file(d1 / "summary.json") == read_file(d2 / "summary.json"));

  const json s = parse(r1.out);
  check_schema_required("summary.schema.json", s);
  CHECK(s["x_star"].get<double>() == doctest::Approx(1.9646147241436784).epsilon(1e-4));
  CHECK(s["alpha_f"].get<double>() == 1.5);
  CHECK(s["err_bound"].get<double>() > 0.0);
  CHECK(s["sup_Cp"].get<double>() > 0.0);
  CHECK(count_data_rows(d1 / "trace.csv") == 200);
  CHECK(read_file(d1 / "trace.csv").rfind("p,log_c,a_p,xi_p,delta_p", 0) == 0);
}

TEST_CASE("simulate: short horizons skip the x* estimate") {
  const fs::path d = fresh_dir();
  const CliResult r = run_cli("simulate --f \"4,-10,6\" --P 12", d);
  CHECK(r.exit_code == 0);
  const json s = parse(r.out);
  CHECK(s["x_star"].is_null());
  CHECK(s["fitted_exponent"].is_null());
  CHECK(count_data_rows(d / "trace.csv") == 12);
}

TEST_CASE("simulate: invalid horizon exits 1") {
  const CliResult r = run_cli("simulate --f \"4,-10,6\" --P 1", fresh_dir());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("linear: explicit kernel with a zero seed is identically zero") {
  const fs::path d = fresh_dir();
  const CliResult r = run_cli("linear --kernel \"0:-4,1:6\" --xi2 0 --P 100", d);
  CHECK(r.exit_code == 0);
  const json j = parse(r.out);
  check_schema_required("linear.schema.json", j);
  CHECK(j["sup_xi"].get<double>() == 0.0);
  CHECK(j["fit"].is_null());
  CHECK(j["moment"]["reconstruction_residual"].get<double>() == 0.0);
  CHECK_FALSE(j["forced"].get<bool>());
}

TEST_CASE("linear: reference weight produces an oscillatory decaying solution") {
  const fs::path d = fresh_dir();
  const CliResult r = run_cli("linear --f \"4,-10,6\" --xi2 8 --P 1500", d);
  CHECK(r.exit_code == 0);
  const json j = parse(r.out);
  CHECK(j["sup_xi"].get<double>() > 0.0);
  CHECK(j["residual"].get<double>() < 1e-12);
  CHECK(j["moment"]["reconstruction_residual"].get<double>() < 1e-9);
  REQUIRE(!j["fit"].is_null());
  CHECK(j["fit"]["exponent"].get<double>() == doctest::Approx(-0.5).epsilon(0.5));
  CHECK(j["fit"]["log_period"].get<double>() ==
        doctest::Approx(4.0 * M_PI / std::sqrt(15.0)).epsilon(0.1));
}

TEST_CASE("linear: forced runs are flagged") {
  const CliResult r = run_cli("linear --f \"4,-10,6\" --xi2 8 --P 500 --h-power 0.75",
                              fresh_dir());
  CHECK(r.exit_code == 0);
  const json j = parse(r.out);
  CHECK(j["forced"].get<bool>());
  CHECK(j["sup_xi"].get<double>() > 0.0);
}

TEST_CASE("stability: scan plateaus and the eigen cross-check is exact") {
  const fs::path d = fresh_dir();
  const CliResult r = run_cli("stability --f \"4,-10,6\" --P 1000 --q0 \"2,10\"", d);
  CHECK(r.exit_code == 0);
  const json j = parse(r.out);
  check_schema_required("stability.schema.json", j);
  CHECK(j["sigma_G"].get<double>() == -0.5);
  CHECK(j["eigen"]["max_mismatch"].get<double>() <= 1e-9);
  const json& mt = j["eigen"]["m_tilde"];
  CHECK(mt[0][0][0].get<double>() == -5.0);
  CHECK(mt[0][1][0].get<double>() == 6.0);
  CHECK(mt[1][0][0].get<double>() == -4.0);
  CHECK(mt[1][1][0].get<double>() == 4.0);
  REQUIRE(j["scan"]["entries"].size() == 2);
  for (const auto& e : j["scan"]["entries"]) {
    CHECK(e["plateau_detected"].get<bool>());
    CHECK(e["sup_norm"].get<double>() < 10.0);
  }
}

TEST_CASE("stability: malformed q0 list exits 1") {
  const CliResult r = run_cli("stability --f \"4,-10,6\" --P 100 --q0 \"2,abc\"",
                              fresh_dir());
  CHECK(r.exit_code == 1);
}

TEST_CASE("verify: selected checks pass and the trace is cached") {
  const fs::path d = fresh_dir();
  const std::string args =
      "verify --f \"4,-10,6\" --P 400 --checks \"identity,hat_xi,appendix\"";
  const CliResult r1 = run_cli(args, d);
  CHECK(r1.exit_code == 0);
  const json j = parse(r1.out);
  check_schema_required("verify.schema.json", j);
  CHECK(j["all_pass"].get<bool>());
  REQUIRE(j["checks"].size() == 3);
  for (const auto& [name, c] : j["checks"].items()) {
    CAPTURE(name);
    CHECK(c["pass"].get<bool>());
  }
  CHECK(fs::exists(d / "trace.csv"));
  CHECK(fs::exists(d / "trace.key"));

  // Second run reuses the cached trace (same key, identical bytes, exit 0).
  const std::string csv_before = read_file(d / "trace.csv");
  const CliResult r2 = run_cli(args, d);
  CHECK(r2.exit_code == 0);
  CHECK(read_file(d / "trace.csv") == csv_before);
  CHECK(parse(r2.out)["all_pass"].get<bool>());
}

TEST_CASE("verify: unknown check names exit 1") {
  const CliResult r = run_cli("verify --f \"4,-10,6\" --P 200 --checks \"identity,nope\"",
                              fresh_dir());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("nope") != std::string::npos);
}

TEST_CASE("verify: short horizons fail decay checks with exit 2") {
  const CliResult r = run_cli("verify --f \"4,-10,6\" --P 150", fresh_dir());
  CHECK(r.exit_code == 2);
  const json j = parse(r.out);
  CHECK_FALSE(j["all_pass"].get<bool>());
  CHECK(j["checks"]["identity"]["pass"].get<bool>());  // the identity still holds
}

TEST_CASE("config file: merged under explicit flags") {
  const fs::path d = fresh_dir();
  {
    std::ofstream cfg(d / "config.json");
    cfg << R"({"f_coeffs": [4, -10, 6], "P": 300, "checks": ["identity"]})";
  }
  const CliResult r1 = run_cli("verify --config config.json", d);
  CHECK(r1.exit_code == 0);
  CHECK(parse(r1.out)["checks"].size() == 1);

  // An explicit --P overrides the config value.
  const fs::path d2 = fresh_dir();
  {
    std::ofstream cfg(d2 / "config.json");
    cfg << R"({"f_coeffs": [4, -10, 6], "P": 300})";
  }
  const CliResult r2 = run_cli("simulate --config config.json --P 150", d2);
  CHECK(r2.exit_code == 0);
  CHECK(count_data_rows(d2 / "trace.csv") == 150);
}

TEST_CASE("config file: unknown keys are rejected") {
  const fs::path d = fresh_dir();
  {
    std::ofstream cfg(d / "config.json");
    cfg << R"({"f_coeffs": [4, -10, 6], "horizon": 300})";
  }
  const CliResult r = run_cli("simulate --config config.json", d);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("horizon") != std::string::npos);
}

TEST_CASE("top-level parsing: help succeeds, bad invocations do not") {
  CHECK(run_cli("--help", fresh_dir()).exit_code == 0);
  CHECK(run_cli("simulate --help", fresh_dir()).exit_code == 0);
  CHECK(run_cli("", fresh_dir()).exit_code != 0);
  CHECK(run_cli("simulate --f \"4,-10,6\" --no-such-flag", fresh_dir()).exit_code != 0);
  CHECK(run_cli("frobnicate", fresh_dir()).exit_code != 0);
}

int main(int argc, char** argv) {
  std::vector<char*> doctest_args;
  doctest_args.push_back(argv[0]);
  for (int i = 1; i < argc; ++i) {
    if (argv[i][0] == '-')
      doctest_args.push_back(argv[i]);
    else
      g_cli = argv[i];
  }
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: test_cli [doctest options] <path-to-recurflow>\n");
    return 1;
  }
  char tmpl[] = "/tmp/recurflow_cli_XXXXXX";
  if (!mkdtemp(tmpl)) {
    std::perror("mkdtemp");
    return 1;
  }
  g_base = tmpl;

  doctest::Context context(static_cast<int>(doctest_args.size()), doctest_args.data());
  const int rc = context.run();
  std::error_code ec;
  fs::remove_all(g_base, ec);
  return rc;
}
