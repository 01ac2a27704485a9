#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "axivort/asymptotics.hpp"
#include "axivort/basis.hpp"
#include "axivort/cli.hpp"
#include "axivort/errors.hpp"
#include "axivort/field.hpp"
#include "axivort/verify.hpp"

namespace axivort::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kOrthoTol = 1e-10;
constexpr double kEigenTol = 1e-6;
constexpr double kWeightTol = 1e-12;

constexpr const char* kManifest = "manifest.json";

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// Every regular file under dir, sorted, with size and FNV-1a digest. The
// manifest itself is listed without a digest since it changes on rewrite.
json list_files(const fs::path& dir) {
  std::vector<fs::path> paths;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) paths.push_back(fs::relative(e.path(), dir));
  if (!fs::exists(dir / kManifest)) paths.emplace_back(kManifest);
  std::sort(paths.begin(), paths.end());
  json files = json::array();
  for (const auto& p : paths) {
    const std::string rel = p.generic_string();
    if (rel == kManifest) {
      files.push_back({{"path", rel}});
      continue;
    }
    const std::string bytes = slurp(dir / p);
    files.push_back({{"path", rel}, {"bytes", bytes.size()}, {"fnv1a", hex64(fnv1a(bytes))}});
  }
  return files;
}

void write_manifest(const fs::path& dir, json manifest) {
  manifest["files"] = list_files(dir);
  write_text(dir / kManifest, manifest.dump(2) + "\n");
}

json grid_json(const Grid& g) {
  return {{"r_max", g.r_max()}, {"z_max", g.z_max()}, {"nr", g.nr()}, {"nz", g.nz()}};
}

std::string log10_or_nan(double v) {
  if (!(std::abs(v) > 0.0) || !std::isfinite(v)) return "nan";
  std::ostringstream s;
  s << std::setprecision(10) << std::log10(std::abs(v));
  return s.str();
}

}  // namespace

int cmd_basis(const BasisOptions& options, std::ostream& out, std::ostream& err) {
  if (options.quad_nodes < 1) {
    err << "basis: quad_nodes must be positive\n";
    return kExitIo;
  }
  try {
    fs::create_directories(options.out);
  } catch (const fs::filesystem_error& e) {
    err << "basis: cannot create " << options.out.string() << ": " << e.code().message() << "\n";
    return kExitIo;
  }

  const verify::BasisResiduals res = verify::basis_residuals(options.max_level, options.quad_nodes);
  const bool ok = res.orthonormality <= kOrthoTol && res.eigenrelation <= kEigenTol &&
                  res.weight_sum_error <= kWeightTol;

  json report = {{"max_level", options.max_level},
                 {"quad_nodes", options.quad_nodes},
                 {"modes", basis::modes_up_to_level(options.max_level).size()},
                 {"orthonormality", res.orthonormality},
                 {"eigenrelation", res.eigenrelation},
                 {"weight_sum_error", res.weight_sum_error},
                 {"tolerances", {{"orthonormality", kOrthoTol}, {"eigenrelation", kEigenTol}, {"weight_sum", kWeightTol}}},
                 {"passed", ok}};
  try {
    std::ostringstream table;
    basis::write_mode_table_csv(table, options.max_level);
    write_text(options.out / "basis_modes.csv", table.str());
    write_text(options.out / "basis_residuals.json", report.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "basis: " << e.what() << "\n";
    return kExitIo;
  }

  out << "orthonormality   " << res.orthonormality << "\n"
      << "eigenrelation    " << res.eigenrelation << "\n"
      << "weight sum error " << res.weight_sum_error << "\n"
      << (ok ? "basis: PASS" : "basis: FAIL") << "\n";
  return ok ? kExitOk : kExitTolerance;
}

int cmd_evolve(const fs::path& config_path, std::ostream& out, std::ostream& err) {
  std::string text;
  evolve::EvolveConfig cfg;
  try {
    text = slurp(config_path);
    cfg = parse_config(text, config_path.parent_path());
  } catch (const std::exception& e) {
    err << "evolve: " << e.what() << "\n";
    return kExitIo;
  }

  const std::string hash = hex64(fnv1a(text));
  const fs::path dir = output_root() / (config_path.stem().string() + "-" + hash.substr(0, 8));
  try {
    fs::remove_all(dir);
    fs::create_directories(dir / "checkpoints");
    write_text(dir / "config.cfg", text);
  } catch (const std::exception& e) {
    err << "evolve: cannot prepare " << dir.string() << ": " << e.what() << "\n";
    return kExitIo;
  }

  json manifest = {{"version", kVersion},
                   {"config_hash", hash},
                   {"config", "config.cfg"},
                   {"grid", grid_json(cfg.grid)},
                   {"dt", cfg.dt},
                   {"t_end", cfg.t_end},
                   {"nonlinear", cfg.nonlinear_on},
                   {"preset", evolve::to_string(cfg.initial.preset)},
                   {"impulse", cfg.initial.impulse}};

  std::size_t index = 0;
  std::string sink_error;
  auto sink = [&](double t, const Field& h) {
    char name[32];
    std::snprintf(name, sizeof name, "ckpt_%05zu.axv", index++);
    try {
      write_checkpoint((dir / "checkpoints" / name).string(), h, t);
    } catch (const std::exception& e) {
      if (sink_error.empty()) sink_error = e.what();
    }
  };

  const auto t0 = Clock::now();
  evolve::Trajectory traj;
  int code = kExitOk;
  std::string status = "ok";
  try {
    traj = evolve::run(cfg, sink);
  } catch (const evolve::RunAborted& e) {
    traj = e.partial();
    code = kExitSolver;
    status = "solver_failure";
    try {
      std::rethrow_exception(e.cause());
    } catch (const CflViolation& c) {
      err << "evolve: CFL violation at t = " << c.time() << " (Courant number " << c.courant()
          << " exceeds cfl = " << cfg.cfl << "); reduce evolve.dt\n";
    } catch (const SolverError& s) {
      err << "evolve: elliptic solve failed: " << s.what() << "\n";
    } catch (const std::exception& other) {
      err << "evolve: step failed: " << other.what() << "\n";
    }
  } catch (const std::exception& e) {
    err << "evolve: " << e.what() << "\n";
    code = kExitIo;
    status = "setup_failure";
  }
  const double wall = seconds_since(t0);

  try {
    if (!traj.times.empty()) {
      std::ofstream trace(dir / "trace.csv", std::ios::binary);
      evolve::write_trace_csv(trace, traj);
      if (!trace) throw std::runtime_error("cannot write trace.csv");
    }
    manifest["wall_seconds"] = wall;
    manifest["status"] = status;
    json summary = {{"steps", traj.times.empty() ? 0 : traj.times.size() - 1}};
    if (!traj.times.empty()) {
      summary["t_start"] = traj.times.front();
      summary["t_reached"] = traj.times.back();
      summary["final_residual"] = traj.l2mu_residual.back();
      summary["impulse_drift"] = std::abs(traj.impulse.back() - traj.impulse.front());
    }
    manifest["summary"] = summary;
    if (!sink_error.empty()) throw std::runtime_error(sink_error);
    write_manifest(dir, manifest);
  } catch (const std::exception& e) {
    err << "evolve: " << e.what() << "\n";
    return code == kExitOk ? kExitIo : code;
  }

  out << "run directory " << dir.string() << "\n"
      << "status " << status << ", " << (traj.times.empty() ? 0 : traj.times.size() - 1) << " steps, "
      << std::fixed << std::setprecision(2) << wall << " s\n";
  return code;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  verify::Suite suite;
  try {
    suite = verify::parse_suite(options.suite);
  } catch (const std::invalid_argument& e) {
    err << "verify: " << e.what() << "\n";
    return kExitIo;
  }
  verify::Scale scale;
  try {
    scale.grid = Grid(scale.grid.r_max(), scale.grid.z_max(), options.n, options.n);
  } catch (const std::invalid_argument& e) {
    err << "verify: " << e.what() << "\n";
    return kExitIo;
  }
  scale.dt = options.dt;
  scale.t_end = options.t_end;

  const fs::path dir = options.out.empty() ? output_root() / "verify" : options.out;
  try {
    fs::create_directories(dir);
  } catch (const fs::filesystem_error& e) {
    err << "verify: cannot create " << dir.string() << ": " << e.code().message() << "\n";
    return kExitIo;
  }

  verify::Context ctx(scale, &err);
  const verify::SuiteReport report = verify::run_suite(suite, ctx);

  json criteria = json::array();
  for (const auto& c : report.criteria) {
    out << "criterion " << std::setw(2) << c.id << " " << std::left << std::setw(24) << c.title << std::right
        << (c.passed ? " PASS " : " FAIL ") << c.detail << "\n";
    json metrics = json::object();
    for (const auto& [k, v] : c.metrics) metrics[k] = std::isfinite(v) ? json(v) : json(nullptr);
    criteria.push_back({{"id", c.id},
                        {"title", c.title},
                        {"passed", c.passed},
                        {"detail", c.detail},
                        {"seconds", c.seconds},
                        {"metrics", metrics}});
  }
  const json summary = {{"version", kVersion},
                        {"suite", verify::to_string(suite)},
                        {"grid", grid_json(scale.grid)},
                        {"dt", scale.dt},
                        {"t_end", scale.t_end},
                        {"passed", report.passed()},
                        {"seconds", report.seconds},
                        {"criteria", criteria}};
  const fs::path file = dir / ("verify_" + std::string(verify::to_string(suite)) + ".json");
  try {
    write_text(file, summary.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "verify: " << e.what() << "\n";
    return kExitIo;
  }
  out << "verify " << verify::to_string(suite) << ": " << (report.passed() ? "PASS" : "FAIL") << " ("
      << file.string() << ")\n";
  return report.passed() ? kExitOk : kExitTolerance;
}

namespace {

struct Series {
  std::string name;
  std::string description;
  std::vector<double> values;
  asymptotics::RateFit fit;
  bool fitted = false;
};

// Exponential fit on the window [2, 0.9 t_end] where the series is nonzero.
void fit_series(const std::vector<double>& t, Series& s, bool allow_log) {
  std::vector<double> tt, yy;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (std::abs(s.values[k]) > 1e-300) {
      tt.push_back(t[k]);
      yy.push_back(std::abs(s.values[k]));
    }
  if (tt.size() < 8) return;
  const double t_max = 0.9 * t.back();
  if (t_max <= 2.0) return;
  try {
    s.fit = asymptotics::fit_rate(tt, yy, allow_log, 2.0, t_max);
    s.fitted = true;
  } catch (const std::exception&) {
  }
}

std::string fit_label(const Series& s) {
  if (!s.fitted) return "no fit";
  std::ostringstream o;
  o << std::setprecision(4) << "rate " << s.fit.lambda_hat;
  if (s.fit.log_factor) o << " with t^" << s.fit.log_power;
  o << " (R^2 " << std::setprecision(6) << s.fit.r_squared << ")";
  return o.str();
}

json fit_json(const Series& s) {
  if (!s.fitted) return nullptr;
  return {{"lambda_hat", s.fit.lambda_hat},
          {"log_factor", s.fit.log_factor},
          {"log_power", s.fit.log_power},
          {"t_min", s.fit.t_min},
          {"t_max", s.fit.t_max},
          {"r_squared", s.fit.r_squared}};
}

}  // namespace

int cmd_report(const fs::path& run_dir, std::string_view format, std::ostream& out, std::ostream& err) {
  if (format != "csv" && format != "json" && format != "gnuplot") {
    err << "report: unknown format '" << format << "' (csv, json, gnuplot)\n";
    return kExitIo;
  }
  const fs::path manifest_path = run_dir / kManifest;
  json manifest;
  TraceTable table;
  try {
    if (!fs::exists(manifest_path)) throw std::runtime_error("no manifest in " + run_dir.string());
    manifest = json::parse(slurp(manifest_path));
    std::ifstream trace(run_dir / "trace.csv");
    if (!trace) throw std::runtime_error("no trace.csv in " + run_dir.string());
    table = read_trace_csv(trace);
  } catch (const std::exception& e) {
    err << "report: " << e.what() << "\n";
    return kExitIo;
  }

  const std::vector<double> t = table.column("t");
  std::vector<Series> series;
  series.push_back({"residual", "||f - <f>||_{L^2(mu)}", table.column("l2mu_residual"), {}, false});
  series.push_back({"m_inf", "sup |m|", table.column("m_inf"), {}, false});
  for (const auto& c : table.columns)
    if (c.rfind("dcoef_", 0) == 0) {
      const std::string idx = c.substr(6);
      series.push_back({"a_" + idx, "projection on discrete mode " + idx, table.column(c), {}, false});
    }
  for (std::size_t k = 0; k < series.size(); ++k) fit_series(t, series[k], k == 0);

  const fs::path dir = run_dir / "report";
  try {
    fs::create_directories(dir);
    if (format == "json") {
      json doc = {{"run", manifest.value("config_hash", "")}, {"t", t}, {"series", json::array()}};
      for (const auto& s : series) {
        json logs = json::array();
        for (double v : s.values) {
          const double l = std::abs(v) > 0.0 ? std::log10(std::abs(v)) : NAN;
          logs.push_back(std::isfinite(l) ? json(l) : json(nullptr));
        }
        doc["series"].push_back(
            {{"name", s.name}, {"description", s.description}, {"values", s.values}, {"log10_abs", logs}, {"fit", fit_json(s)}});
      }
      write_text(dir / "report.json", doc.dump(1) + "\n");
    } else {
      std::ostringstream data;
      data << std::setprecision(17);
      const char* c = "# ";
      data << c << "axivort report for run " << manifest.value("config_hash", "") << "\n";
      data << c << "t: rescaled time\n";
      for (const auto& s : series) {
        data << c << s.name << ": " << s.description << "\n";
        data << c << "log10_" << s.name << ": log10 |" << s.name << "|, nan where zero; " << fit_label(s) << "\n";
      }
      const std::string sep = format == "csv" ? "," : " ";
      data << (format == "csv" ? "" : "# ") << "t";
      for (const auto& s : series) data << sep << s.name << sep << "log10_" << s.name;
      data << "\n";
      for (std::size_t k = 0; k < t.size(); ++k) {
        data << t[k];
        for (const auto& s : series) data << sep << s.values[k] << sep << log10_or_nan(s.values[k]);
        data << "\n";
      }
      if (format == "csv") {
        write_text(dir / "report.csv", data.str());
      } else {
        write_text(dir / "report.dat", data.str());
        std::ostringstream gp;
        gp << "# Renders decay curves to SVG on stdout: gnuplot report.gp > report.svg\n"
           << "datafile = '" << fs::absolute(dir / "report.dat").generic_string() << "'\n"
           << "set terminal svg size 900,600 dynamic noenhanced\n"
           << "set datafile missing 'nan'\n"
           << "set xlabel 't'\n"
           << "set ylabel 'log10 |.|'\n"
           << "set key outside right\n"
           << "set grid\n";
        for (std::size_t k = 0; k < series.size(); ++k)
          if (series[k].fitted && k < 12) {
            gp << "set label " << k + 1 << " '" << series[k].name << ": " << fit_label(series[k])
               << "' at graph 0.02, graph " << 0.97 - 0.04 * static_cast<double>(k) << " font ',8'\n";
          }
        gp << "plot \\\n";
        for (std::size_t k = 0; k < series.size(); ++k) {
          gp << "  datafile using 1:" << 3 + 2 * k << " with lines title '" << series[k].name << "'"
             << (k + 1 < series.size() ? ", \\\n" : "\n");
        }
        write_text(dir / "report.gp", gp.str());
      }
    }
    manifest["reports"][std::string(format)] = {{"generated", true}};
    write_manifest(run_dir, manifest);
  } catch (const std::exception& e) {
    err << "report: " << e.what() << "\n";
    return kExitIo;
  }
  out << "report written to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace axivort::cli
