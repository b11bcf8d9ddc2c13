// End-to-end checks of the command-line tool.  The binary path comes in via
// OWRTE_CLI_PATH from the build; everything runs through std::system with
// stdout/stderr captured to files in a scratch directory.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "owrte_cli_scratch";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

struct RunResult {
  int rc = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path op = scratch() / ("stdout_" + std::to_string(counter));
  const fs::path ep = scratch() / ("stderr_" + std::to_string(counter));
  ++counter;
  const std::string cmd = std::string("\"") + OWRTE_CLI_PATH + "\" " + args +
                          " >" + op.string() + " 2>" + ep.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  if (status != -1 && WIFEXITED(status)) r.rc = WEXITSTATUS(status);
  r.out = slurp(op);
  r.err = slurp(ep);
  return r;
}

std::string first_line(const std::string& s) {
  return s.substr(0, s.find('\n'));
}

}  // namespace

TEST_CASE("help exits cleanly and lists the subcommands") {
  RunResult r = run_cli("--help");
  CHECK(r.rc == 0);
  CHECK(r.out.find("Usage") != std::string::npos);
  for (const char* sub : {"xsection", "mfp", "hg", "solve", "wigner",
                          "diffuse", "mc", "coherent", "run"})
    CHECK_MESSAGE(r.out.find(sub) != std::string::npos, sub);
}

TEST_CASE("xsection stamps outputs with the config hash") {
  const fs::path cfg = scratch() / "xs.json";
  spit(cfg, json{{"grid", {{"n", 32}}}}.dump());
  const fs::path dir = scratch() / "xs_out";
  RunResult r = run_cli("xsection --config " + cfg.string() + " --out " +
                        dir.string());
  CAPTURE(r.err);
  REQUIRE(r.rc == 0);

  const std::string csv = slurp(dir / "xsection.csv");
  REQUIRE_FALSE(csv.empty());
  CHECK(first_line(csv).rfind("# config_hash=", 0) == 0);
  CHECK(csv.find("sigma[1/L]") != std::string::npos);
  CHECK(csv.find("mfp[L]") != std::string::npos);

  const json resolved = json::parse(slurp(dir / "config.json"));
  CHECK(resolved.at("grid").at("n").get<int>() == 32);
  const json summary = json::parse(slurp(dir / "xsection.json"));
  CHECK(summary.at("max_sigma").get<double>() > 0.0);
  CHECK(summary.at("config_hash").is_string());
}

TEST_CASE("cone-violating config is rejected with exit code 2") {
  const fs::path cfg = scratch() / "bad.json";
  spit(cfg, json{{"params", {{"kappa_max", 1.5}}}}.dump());
  RunResult r = run_cli("xsection --config " + cfg.string() + " --out " +
                        (scratch() / "bad_out").string());
  CHECK(r.rc == 2);
  CHECK(r.err.find("cone") != std::string::npos);
}

TEST_CASE("unknown scenario name is a configuration error") {
  RunResult r = run_cli("run no-such-thing --out " +
                        (scratch() / "nope_out").string());
  CHECK(r.rc == 2);
  CHECK(r.err.find("unknown scenario") != std::string::npos);
}

TEST_CASE("hg subcommand reports the frozen anisotropy factor") {
  const fs::path dir = scratch() / "hg_out";
  RunResult r = run_cli("hg --k-ell 5 --r0 1 --out " + dir.string());
  CAPTURE(r.err);
  REQUIRE(r.rc == 0);
  CHECK(r.out.find("0.819002") != std::string::npos);
  const json summary = json::parse(slurp(dir / "hg.json"));
  CHECK(summary.at("g").get<double>() ==
        doctest::Approx(0.8190024875775822).epsilon(1e-12));
  CHECK(summary.at("max_rel_dev").get<double>() <= 1e-10);
}

TEST_CASE("run hg-check passes out of the box") {
  RunResult r = run_cli("run hg-check --out " +
                        (scratch() / "hgc_out").string());
  CAPTURE(r.err);
  CHECK(r.rc == 0);
  CHECK(r.out.find("[hg-check] PASS") != std::string::npos);
}

TEST_CASE("numeric failure maps to exit code 1") {
  // Same physics as the passing run, but with an unreachable tolerance.
  const fs::path cfg = scratch() / "tight.json";
  spit(cfg, json{{"params", {{"ell", 5.0 / 6.283185307179586}}},
                 {"medium", {{"kind", "lorentzian2d"}}},
                 {"tolerances", {{"hg_check", 1e-30}}}}
                .dump());
  RunResult r = run_cli("run hg-check --config " + cfg.string() + " --out " +
                        (scratch() / "tight_out").string());
  CHECK(r.rc == 1);
  CHECK(r.out.find("[hg-check] FAIL") != std::string::npos);
}

TEST_CASE("hg-check against a gaussian medium is a configuration error") {
  const fs::path cfg = scratch() / "hg_gauss.json";
  spit(cfg, json{{"medium", {{"kind", "gaussian"}}}}.dump());
  RunResult r = run_cli("run hg-check --config " + cfg.string() + " --out " +
                        (scratch() / "hg_gauss_out").string());
  CHECK(r.rc == 2);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("solve accepts mean-free-path relative ranges") {
  const fs::path cfg = scratch() / "solve.json";
  spit(cfg, json{{"grid", {{"n", 16}}}, {"targets", {"0.5S", "1S"}}}.dump());
  const fs::path dir = scratch() / "solve_out";
  RunResult r = run_cli("solve --config " + cfg.string() + " --out " +
                        dir.string());
  CAPTURE(r.err);
  REQUIRE(r.rc == 0);
  const json summary = json::parse(slurp(dir / "solve.json"));
  const double s0 = summary.at("s0").get<double>();
  REQUIRE(s0 > 0.0);
  const auto& targets = summary.at("targets");
  REQUIRE(targets.size() == 2);
  CHECK(targets[0].at("z").get<double>() ==
        doctest::Approx(0.5 * s0).epsilon(1e-12));
  CHECK(targets[1].at("z").get<double>() ==
        doctest::Approx(s0).epsilon(1e-12));
  CHECK(summary.at("max_rel_mass_dev").get<double>() < 1e-6);
}

TEST_CASE("monte carlo runs are byte-identical for a fixed config and seed") {
  const fs::path cfg = scratch() / "mc.json";
  spit(cfg, json{{"grid", {{"n", 16}}},
                 {"mc", {{"particles", 2000}}},
                 {"targets", {"0.5"}}}
                .dump());
  const fs::path dir = scratch() / "mc_out";
  RunResult r1 = run_cli("mc --config " + cfg.string() + " --out " +
                         dir.string());
  CAPTURE(r1.err);
  REQUIRE(r1.rc == 0);
  const std::string hist1 = slurp(dir / "mc_histogram.csv");
  const std::string json1 = slurp(dir / "mc.json");
  REQUIRE_FALSE(hist1.empty());

  RunResult r2 = run_cli("mc --config " + cfg.string() + " --out " +
                         dir.string());
  REQUIRE(r2.rc == 0);
  CHECK(slurp(dir / "mc_histogram.csv") == hist1);
  CHECK(slurp(dir / "mc.json") == json1);
}

TEST_CASE("resolved config survives a parse-serialize-parse round trip") {
  const fs::path cfg = scratch() / "rt_seed.json";
  spit(cfg, json{{"grid", {{"n", 24}}},
                 {"params", {{"alpha", 0.07}}},
                 {"targets", {0.25, "1S"}}}
                .dump());
  const fs::path dir = scratch() / "rt_out";
  RunResult r1 = run_cli("xsection --config " + cfg.string() + " --out " +
                         dir.string());
  CAPTURE(r1.err);
  REQUIRE(r1.rc == 0);

  const std::string emitted = slurp(dir / "config.json");
  REQUIRE_FALSE(emitted.empty());
  const fs::path copy = scratch() / "rt_copy.json";
  spit(copy, emitted);

  // Rerunning from the emitted config (which pins the output directory)
  // must reproduce the exact same resolved config.
  RunResult r2 = run_cli("xsection --config " + copy.string());
  CAPTURE(r2.err);
  REQUIRE(r2.rc == 0);
  CHECK(slurp(dir / "config.json") == emitted);
}
