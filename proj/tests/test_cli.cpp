#include "relax/cli.hpp"
#include "relax/config.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace relax;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "relaxbench_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "experiment.cfg";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string demo_config(const std::string& name, const std::string& extra = "") {
  return "[system]\nkind = demo\nname = " + name + "\n[grid]\nn = 64\n[solver]\neps = 0.1\nT = 0.01\n" + extra;
}

CliOptions options(const fs::path& out, int threads = 1) {
  CliOptions o;
  o.out = out;
  o.threads = threads;
  return o;
}

}  // namespace

TEST_CASE("config errors name the line and field") {
  try {
    parse_config("[system]\nkind = demo\nname = heat1d\n[grid]\nn = 64\n[solver]\neps = abc\n", "bad.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad.cfg:7") != std::string::npos);
    CHECK(msg.find("solver.eps") != std::string::npos);
  }
  try {
    parse_config("[grid]\nn = 64\n", "x.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("system.kind") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[system]\nkind = demo\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nowhere]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\nkind = demo\nkind = raw\n"), ConfigError);
}

TEST_CASE("config values are parsed") {
  const ExperimentConfig c = parse_config(
      "# comment\n[system]\nkind = demo\nname = carleman\n[grid]\nn = 128\n"
      "[solver]\neps = 0.05\nflux = spectral\ncfl = 0.2\n[experiment]\nladder = 0.2, 0.1, 0.05\n");
  CHECK(c.kind == "demo");
  CHECK(c.demo == "carleman");
  CHECK(c.cells == std::vector<int>{128});
  CHECK(c.eps == 0.05);
  CHECK(c.solver.flux == FluxScheme::spectral);
  CHECK(c.solver.cfl == 0.2);
  CHECK(c.ladder == std::vector<double>{0.2, 0.1, 0.05});
}

TEST_CASE("validate command exit codes and report") {
  const fs::path dir = scratch("validate");
  std::ostringstream log;
  CHECK(cmd_validate(write_config(dir, demo_config("carleman")), options(dir / "ok"), log) == kExitOk);
  const std::string report = slurp(dir / "ok" / "report.csv");
  CHECK(report.rfind("check,pass,margin,witness\n", 0) == 0);
  int rows = 0;
  for (char ch : report) rows += ch == '\n';
  CHECK(rows - 1 >= 6);

  CHECK(cmd_validate(write_config(dir, demo_config("null-limit")), options(dir / "null"), log) == kExitCheckFailed);
  const std::string null_report = slurp(dir / "null" / "report.csv");
  CHECK(null_report.find("conserved_block,false") != std::string::npos);
  CHECK(null_report.find("null-limit") != std::string::npos);

  CHECK(cmd_validate(write_config(dir, "[grid]\nn = 64\n"), options(dir / "bad"), log) == kExitBadInput);
  CHECK(log.str().find("system.kind") != std::string::npos);
}

TEST_CASE("run command") {
  const fs::path dir = scratch("run");
  std::ostringstream log;
  CHECK(cmd_run(write_config(dir, demo_config("heat1d")), options(dir / "a"), log) == kExitOk);
  CHECK(fs::exists(dir / "a" / "snapshot_0000.csv"));
  CHECK(fs::exists(dir / "a" / "snapshot_0001.csv"));
  CHECK(fs::exists(dir / "a" / "step_log.csv"));
  CHECK(slurp(dir / "a" / "step_log.csv").rfind("t,dt,energy,max_speed\n", 0) == 0);

  const std::string zero = "[system]\nkind = demo\nname = heat1d\n[grid]\nn = 64\n[solver]\nT = 0\n";
  CHECK(cmd_run(write_config(dir, zero), options(dir / "zero"), log) == kExitOk);
  CHECK(fs::exists(dir / "zero" / "snapshot_0000.csv"));
  CHECK_FALSE(fs::exists(dir / "zero" / "snapshot_0001.csv"));

  // Density 0.5 sin(2 pi x) takes non-positive values.
  const std::string neg = demo_config("carleman", "[experiment]\nmean = 0\namplitude = 0.5\n");
  CHECK(cmd_run(write_config(dir, neg), options(dir / "neg"), log) == kExitBadInput);
  CHECK_FALSE(fs::exists(dir / "neg" / "snapshot_0000.csv"));

  CHECK(cmd_run(write_config(dir, demo_config("null-limit")), options(dir / "null"), log) == kExitCheckFailed);
  CliOptions allow = options(dir / "null2");
  allow.allow_invalid = true;
  CHECK(cmd_run(write_config(dir, demo_config("null-limit")), allow, log) == kExitOk);
}

TEST_CASE("converge command rejects a ladder that is not decreasing") {
  const fs::path dir = scratch("ladder");
  std::ostringstream log;
  const std::string cfg = demo_config("heat1d", "[experiment]\nladder = 0.1, 0.2\n");
  CHECK(cmd_converge(write_config(dir, cfg), options(dir / "out"), log) == kExitBadInput);
  const std::string cfg2 = demo_config("heat1d", "[experiment]\nladder = 0.1, 0.2, 0.05\n");
  CHECK(cmd_converge(write_config(dir, cfg2), options(dir / "out"), log) == kExitBadInput);
  CHECK(cmd_converge(write_config(dir, demo_config("heat1d")), options(dir / "out"), log) == kExitBadInput);
}

TEST_CASE("outputs are bit-identical across repeats and thread counts") {
  const fs::path dir = scratch("determinism");
  std::ostringstream log;
  const fs::path cfg = write_config(
      dir, demo_config("carleman", "snapshot_stride = 0.005\n[experiment]\nladder = 0.2, 0.1, 0.05\nreference = true\n"));
  const int first = cmd_converge(cfg, options(dir / "c1"), log);
  CHECK(first != kExitBadInput);
  CHECK(cmd_converge(cfg, options(dir / "c4", 4), log) == first);
  CHECK(slurp(dir / "c1" / "convergence.csv") == slurp(dir / "c4" / "convergence.csv"));
  REQUIRE(cmd_run(cfg, options(dir / "r1"), log) == kExitOk);
  REQUIRE(cmd_run(cfg, options(dir / "r2", 4), log) == kExitOk);
  for (const auto& entry : fs::directory_iterator(dir / "r1")) {
    CHECK(slurp(entry.path()) == slurp(dir / "r2" / entry.path().filename()));
  }
}

TEST_CASE("command line parsing") {
  std::ostringstream out, err;
  std::vector<std::string> args{"relaxbench", "frobnicate"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  CHECK(run_cli(static_cast<int>(argv.size()), argv.data(), out, err) == kExitBadInput);
}
