#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"

#include "axivort/cli.hpp"

using namespace axivort;
using namespace axivort::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("axivort_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    ::setenv("AXIVORT_OUTPUT_ROOT", (d / "runs").c_str(), 1);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / (name + ".cfg");
  std::ofstream(p) << text;
  return p;
}

const char* kSmall = R"([grid]
nr = 32
nz = 32
[evolve]
dt = 0.01
t_end = 1
checkpoint_every = 50
trace_level = 4
[initial]
preset = mode_perturbation
impulse = 1
modes = 0,1:0.1
)";

fs::path run_dir_for(const fs::path& cfg) {
  return output_root() / (cfg.stem().string() + "-" + hex64(fnv1a(slurp(cfg))).substr(0, 8));
}

fs::path evolve_small(const std::string& name) {
  const fs::path cfg = write_config(name, kSmall);
  std::ostringstream out, err;
  REQUIRE(cmd_evolve(cfg, out, err) == kExitOk);
  return run_dir_for(cfg);
}

TraceTable load_trace(const fs::path& dir) {
  std::ifstream in(dir / "trace.csv");
  return read_trace_csv(in);
}

}  // namespace

TEST_CASE("fnv1a matches published test vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(R"(
[grid]
r_max = 10
nr = 64
nz = 48
[evolve]
dt = 0.005
nonlinear = false
trace_level = 6
[initial]
preset = mode_perturbation
impulse = 0
modes = 0,1:0.1; 1,0:-0.05
)");
  CHECK(cfg.grid.r_max() == 10.0);
  CHECK(cfg.grid.z_max() == 12.0);
  CHECK(cfg.grid.nr() == 64);
  CHECK(cfg.grid.nz() == 48);
  CHECK(cfg.dt == 0.005);
  CHECK_FALSE(cfg.nonlinear_on);
  CHECK(cfg.trace_level == 6);
  REQUIRE(cfg.initial.modes.size() == 2);
  CHECK(cfg.initial.modes[1].idx.ell == 1);
  CHECK(cfg.initial.modes[1].idx.n == 0);
  CHECK(cfg.initial.modes[1].amplitude == -0.05);

  SUBCASE("unknown keys and sections are errors") {
    CHECK_THROWS_AS(parse_config("[grid]\nnrr = 64\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\ntol = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("dt = 0.1\n"), ConfigError);
  }
  SUBCASE("malformed values are errors") {
    CHECK_THROWS_AS(parse_config("[evolve]\ndt = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[evolve]\ndt = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[evolve]\nnonlinear = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nnr = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[initial]\npreset = custom\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[initial]\nmodes = 0:1\n"), ConfigError);
  }
}

TEST_CASE("bundled presets parse") {
  const fs::path dir = fs::path(AXIVORT_SOURCE_DIR) / "presets";
  std::size_t count = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".cfg") continue;
    CAPTURE(e.path().string());
    CHECK_NOTHROW(load_config(e.path()));
    ++count;
  }
  CHECK(count >= 6);
}

TEST_CASE("basis command exit codes") {
  std::ostringstream out, err;
  CHECK(cmd_basis({8, 18, scratch() / "basis"}, out, err) == kExitOk);
  CHECK(fs::exists(scratch() / "basis" / "basis_modes.csv"));
  const auto report = nlohmann::json::parse(slurp(scratch() / "basis" / "basis_residuals.json"));
  CHECK(report["passed"].get<bool>());

  CHECK(cmd_basis({8, 2, scratch() / "basis_coarse"}, out, err) == kExitTolerance);

  std::ofstream(scratch() / "plain_file") << "x";
  CHECK(cmd_basis({8, 18, scratch() / "plain_file" / "sub"}, out, err) == kExitIo);
}

TEST_CASE("evolve writes traces, checkpoints and a complete manifest") {
  const fs::path dir = evolve_small("smoke");
  const TraceTable trace = load_trace(dir);
  CHECK(trace.rows.size() == 101);
  CHECK(trace.has("l2mu_residual"));
  CHECK(trace.has("dcoef_0_1"));

  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["version"] == std::string(kVersion));
  CHECK(manifest["grid"]["nr"] == 32);
  std::set<std::string> listed;
  for (const auto& f : manifest["files"]) listed.insert(f["path"].get<std::string>());
  std::size_t on_disk = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    ++on_disk;
    CHECK(listed.count(fs::relative(e.path(), dir).generic_string()) == 1);
  }
  CHECK(on_disk == listed.size());
  CHECK(listed.count("checkpoints/ckpt_00002.axv") == 1);
}

TEST_CASE("evolve reports parse failures and CFL violations") {
  std::ostringstream out, err;
  CHECK(cmd_evolve(scratch() / "missing.cfg", out, err) == kExitIo);
  CHECK(cmd_evolve(write_config("typo", "[evolve]\nd_t = 0.1\n"), out, err) == kExitIo);

  std::string text = kSmall;
  text.replace(text.find("dt = 0.01"), 9, "dt = 0.5");
  text.replace(text.find("impulse = 1"), 11, "impulse = 20");
  const fs::path cfg = write_config("cfl", text);
  std::ostringstream err2;
  CHECK(cmd_evolve(cfg, out, err2) == kExitSolver);
  CHECK(err2.str().find("CFL") != std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(run_dir_for(cfg) / "manifest.json"));
  CHECK(manifest["status"] == "solver_failure");
}

TEST_CASE("serial reruns produce byte-identical traces") {
  const fs::path dir = evolve_small("repeat");
  const std::string first = slurp(dir / "trace.csv");
  evolve_small("repeat");
  CHECK(slurp(dir / "trace.csv") == first);
}

TEST_CASE("resuming from a checkpoint reproduces the uninterrupted run") {
  const fs::path full = evolve_small("whole");
  const fs::path ckpt = full / "checkpoints" / "ckpt_00001.axv";
  REQUIRE(fs::exists(ckpt));

  std::string text = kSmall;
  text.replace(text.find("preset = mode_perturbation"), 26, "preset = custom\npath = " + ckpt.string());
  const fs::path cfg = write_config("resumed", text);
  std::ostringstream out, err;
  REQUIRE(cmd_evolve(cfg, out, err) == kExitOk);

  const TraceTable a = load_trace(full);
  const TraceTable b = load_trace(run_dir_for(cfg));
  REQUIRE(a.columns == b.columns);
  REQUIRE(b.rows.size() == 51);
  double worst = 0.0;
  for (std::size_t k = 0; k < b.rows.size(); ++k)
    for (std::size_t c = 0; c < b.columns.size(); ++c)
      worst = std::max(worst, std::abs(a.rows[50 + k][c] - b.rows[k][c]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("report formats") {
  const fs::path dir = evolve_small("plotted");
  std::ostringstream out, err;
  REQUIRE(cmd_report(dir, "csv", out, err) == kExitOk);
  REQUIRE(cmd_report(dir, "json", out, err) == kExitOk);
  REQUIRE(cmd_report(dir, "gnuplot", out, err) == kExitOk);
  CHECK(cmd_report(dir, "svg", out, err) == kExitIo);

  const std::string csv = slurp(dir / "report" / "report.csv");
  CHECK(csv.rfind("# ", 0) == 0);
  CHECK(csv.find("# log10_residual:") != std::string::npos);
  std::istringstream in(csv);
  const TraceTable table = read_trace_csv(in);
  CHECK(table.rows.size() == 101);
  const auto r = table.column("residual");
  const auto lr = table.column("log10_residual");
  CHECK(lr[10] == doctest::Approx(std::log10(r[10])).epsilon(1e-9));

  const auto doc = nlohmann::json::parse(slurp(dir / "report" / "report.json"));
  CHECK(doc["series"].size() == table.columns.size() / 2);

  const std::string gp = slurp(dir / "report" / "report.gp");
  CHECK(gp.find("report.dat") != std::string::npos);
  CHECK(gp.find("plot") != std::string::npos);

  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  std::set<std::string> listed;
  for (const auto& f : manifest["files"]) listed.insert(f["path"].get<std::string>());
  for (const char* f : {"report/report.csv", "report/report.json", "report/report.gp", "report/report.dat"})
    CHECK(listed.count(f) == 1);

  fs::create_directories(scratch() / "empty_run");
  CHECK(cmd_report(scratch() / "empty_run", "csv", out, err) == kExitIo);
}
