#include <cstdio>
#include <cstdlib>
#include <istream>
#include <sstream>

#include "axivort/cli.hpp"

namespace axivort::cli {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::filesystem::path output_root() {
  const char* env = std::getenv("AXIVORT_OUTPUT_ROOT");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("runs");
}

bool TraceTable::has(std::string_view name) const {
  for (const auto& c : columns)
    if (c == name) return true;
  return false;
}

std::vector<double> TraceTable::column(std::string_view name) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k] == name) {
      std::vector<double> out;
      out.reserve(rows.size());
      for (const auto& row : rows) out.push_back(row[k]);
      return out;
    }
  throw std::out_of_range("trace has no column '" + std::string(name) + "'");
}

TraceTable read_trace_csv(std::istream& in) {
  TraceTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (t.columns.empty()) {
      while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw std::runtime_error("trace: malformed value '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.columns.size()) throw std::runtime_error("trace: row width does not match header");
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw std::runtime_error("trace: missing header");
  return t;
}

}  // namespace axivort::cli
