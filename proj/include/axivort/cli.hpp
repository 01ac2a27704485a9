#pragma once

// Command implementations behind the `axivort` executable, plus the
// configuration and run-directory plumbing they share.
//
// Exit codes: 0 success, 1 parse or I/O failure, 2 tolerance breach or failed
// verification, 3 solver failure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "axivort/evolve.hpp"

namespace axivort::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitTolerance = 2;
inline constexpr int kExitSolver = 3;

inline constexpr std::string_view kVersion = "0.1.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses INI text with sections [grid], [evolve], [initial]. Unknown sections
/// or keys and malformed values throw ConfigError. Relative checkpoint paths
/// are resolved against base_dir.
evolve::EvolveConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
evolve::EvolveConfig load_config(const std::filesystem::path& path);

/// "l,n:amplitude" entries separated by ';', e.g. "0,1:0.1; 1,0:-0.05".
std::vector<evolve::ModeAmplitude> parse_modes(std::string_view text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// $AXIVORT_OUTPUT_ROOT, or "runs" when unset.
std::filesystem::path output_root();

/// Columns of a trace CSV written by evolve::write_trace_csv.
struct TraceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(std::string_view name) const;
  bool has(std::string_view name) const;
};

TraceTable read_trace_csv(std::istream& in);

struct BasisOptions {
  unsigned max_level = 8;
  std::size_t quad_nodes = 18;
  std::filesystem::path out = ".";
};

struct VerifyOptions {
  std::string suite = "all";
  std::size_t n = 256;
  double dt = 2e-3;
  double t_end = 10.0;
  std::filesystem::path out;  // empty: output_root()
};

int cmd_basis(const BasisOptions& options, std::ostream& out, std::ostream& err);
int cmd_evolve(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);
int cmd_report(const std::filesystem::path& run_dir, std::string_view format, std::ostream& out, std::ostream& err);

}  // namespace axivort::cli
