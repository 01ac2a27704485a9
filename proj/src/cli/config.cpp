#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "axivort/cli.hpp"

namespace axivort::cli {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw ConfigError("config: '" + key + "' expects a number, got '" + raw + "'");
  return out;
}

std::size_t to_size(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + raw + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& raw) {
  std::string v = trim(raw);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError("config: '" + key + "' expects a boolean, got '" + raw + "'");
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"grid", {"r_max", "z_max", "nr", "nz"}},
      {"evolve", {"dt", "t_end", "nonlinear", "checkpoint_every", "cfl", "refresh_velocity", "trace_level"}},
      {"initial", {"preset", "impulse", "modes", "path"}},
  };
  return keys;
}

}  // namespace

std::vector<evolve::ModeAmplitude> parse_modes(std::string_view text) {
  std::vector<evolve::ModeAmplitude> out;
  std::string all(text);
  std::stringstream ss(all);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    const auto comma = item.find(',');
    if (colon == std::string::npos || comma == std::string::npos || comma > colon)
      throw ConfigError("config: mode entry '" + item + "' is not of the form l,n:amplitude");
    evolve::ModeAmplitude m;
    m.idx.ell = static_cast<unsigned>(to_size("modes", item.substr(0, comma)));
    m.idx.n = static_cast<unsigned>(to_size("modes", item.substr(comma + 1, colon - comma - 1)));
    m.amplitude = to_double("modes", item.substr(colon + 1));
    out.push_back(m);
  }
  return out;
}

evolve::EvolveConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  evolve::EvolveConfig cfg;
  double r_max = cfg.grid.r_max(), z_max = cfg.grid.z_max();
  std::size_t nr = cfg.grid.nr(), nz = cfg.grid.nz();

  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it != known_keys().end() && !body.data().empty())
      throw ConfigError("config: key '" + section + "' outside of a section");
    if (it == known_keys().end()) {
      if (!body.data().empty()) throw ConfigError("config: key '" + section + "' outside of a section");
      throw ConfigError("config: unknown section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      const std::string name = section + "." + key;
      if (!it->second.count(key)) throw ConfigError("config: unknown key '" + name + "'");
      const std::string v = node.data();
      if (section == "grid") {
        if (key == "r_max") r_max = to_double(name, v);
        else if (key == "z_max") z_max = to_double(name, v);
        else if (key == "nr") nr = to_size(name, v);
        else if (key == "nz") nz = to_size(name, v);
      } else if (section == "evolve") {
        if (key == "dt") cfg.dt = to_double(name, v);
        else if (key == "t_end") cfg.t_end = to_double(name, v);
        else if (key == "nonlinear") cfg.nonlinear_on = to_bool(name, v);
        else if (key == "checkpoint_every") cfg.checkpoint_every = to_size(name, v);
        else if (key == "cfl") cfg.cfl = to_double(name, v);
        else if (key == "refresh_velocity") cfg.refresh_velocity = to_bool(name, v);
        else if (key == "trace_level") cfg.trace_level = static_cast<unsigned>(to_size(name, v));
      } else {
        if (key == "preset") {
          try {
            cfg.initial.preset = evolve::parse_preset(trim(v));
          } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
          }
        } else if (key == "impulse") {
          cfg.initial.impulse = to_double(name, v);
        } else if (key == "modes") {
          cfg.initial.modes = parse_modes(v);
        } else if (key == "path") {
          std::filesystem::path p = trim(v);
          if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
          cfg.initial.path = p.string();
        }
      }
    }
  }
  try {
    cfg.grid = Grid(r_max, z_max, nr, nz);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(cfg.dt > 0.0)) throw ConfigError("config: evolve.dt must be positive");
  if (!(cfg.cfl > 0.0)) throw ConfigError("config: evolve.cfl must be positive");
  if (cfg.initial.preset == evolve::Preset::custom && cfg.initial.path.empty())
    throw ConfigError("config: preset 'custom' needs initial.path");
  return cfg;
}

evolve::EvolveConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

}  // namespace axivort::cli
