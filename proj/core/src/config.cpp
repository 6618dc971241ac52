#include "pqs/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "pqs/errors.hpp"

namespace pqs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double snap(double x) { return std::round(x * 1e12) / 1e12; }

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in, const std::string& source) {
  ConfigFile cfg;
  cfg.source_ = source;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    ConfigEntry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
    if (e.key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    cfg.entries_.push_back(std::move(e));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

const ConfigEntry* ConfigFile::find(const std::string& key) const {
  const ConfigEntry* hit = nullptr;
  for (const auto& e : entries_) {
    if (e.key == key) hit = &e;
  }
  return hit;
}

std::vector<const ConfigEntry*> ConfigFile::all(const std::string& key) const {
  std::vector<const ConfigEntry*> out;
  for (const auto& e : entries_) {
    if (e.key == key) out.push_back(&e);
  }
  return out;
}

void ConfigFile::require_known(const std::set<std::string>& allowed) const {
  for (const auto& e : entries_) {
    if (!allowed.contains(e.key)) fail(e, "unknown key '" + e.key + "'");
  }
}

void ConfigFile::fail(const ConfigEntry& entry, const std::string& message) const {
  throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": " + message);
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  const auto* e = find(key);
  return e ? e->value : fallback;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  const auto* e = find(key);
  if (!e) return fallback;
  try {
    return parse_double(e->value);
  } catch (const ConfigError& err) {
    fail(*e, err.what());
  }
}

std::uint64_t ConfigFile::get_uint(const std::string& key, std::uint64_t fallback) const {
  const auto* e = find(key);
  if (!e) return fallback;
  try {
    return parse_uint(e->value);
  } catch (const ConfigError& err) {
    fail(*e, err.what());
  }
}

std::vector<double> ConfigFile::get_grid(const std::string& key, const std::vector<double>& fallback) const {
  const auto* e = find(key);
  if (!e) return fallback;
  try {
    return parse_grid(e->value);
  } catch (const ConfigError& err) {
    fail(*e, err.what());
  }
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
    throw ConfigError("expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw ConfigError("grid step must be positive");
  if (stop < start) throw ConfigError("grid stop precedes start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count > 10'000'000) throw ConfigError("grid too large");
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) g[k] = snap(start + static_cast<double>(k) * step);
  return g;
}

std::vector<double> parse_grid(const std::string& text) {
  const auto tok = split_ws(text);
  if (tok.size() != 3) throw ConfigError("grid needs 'start stop step', got '" + text + "'");
  return make_grid(parse_double(tok[0]), parse_double(tok[1]), parse_double(tok[2]));
}

LatticeFile parse_lattice(std::istream& in, const std::string& source) {
  const ConfigFile cfg = ConfigFile::parse(in, source);
  const ConfigEntry* sites_entry = cfg.find("sites");
  if (!sites_entry) throw ConfigError(source + ": lattice needs 'sites = N'");
  const auto n = static_cast<int>(cfg.get_uint("sites", 0));
  if (n < 2 || n > kMaxSites) cfg.fail(*sites_entry, "site count out of range");

  auto site_list = [&](const ConfigEntry& e) {
    std::vector<int> out;
    for (const auto& t : split_ws(e.value)) {
      std::uint64_t v = 0;
      try {
        v = parse_uint(t);
      } catch (const ConfigError& err) {
        cfg.fail(e, err.what());
      }
      if (v < 1 || static_cast<int>(v) > n) cfg.fail(e, "site " + t + " out of range");
      out.push_back(static_cast<int>(v) - 1);
    }
    return out;
  };

  std::vector<Bond> bonds;
  std::map<std::string, double> couplings;
  LatticeFile lf{checkerboard_geometry(), std::nullopt};
  VbGeometry& g = lf.geometry;
  g.ring.clear();
  g.symmetry.clear();
  g.plaquette.clear();
  std::optional<std::pair<const ConfigEntry*, std::string>> ratio_key;

  for (const auto& e : cfg.entries()) {
    if (e.key == "sites") continue;
    if (e.key == "bond") {
      const auto tok = split_ws(e.value);
      if (tok.size() != 3) cfg.fail(e, "bond needs 'i j Jname'");
      ConfigEntry sub = e;
      sub.value = tok[0] + " " + tok[1];
      const auto ij = site_list(sub);
      if (ij[0] == ij[1]) cfg.fail(e, "self-edge");
      bonds.push_back({ij[0], ij[1], 1.0, tok[2]});
    } else if (e.key == "ring") {
      g.ring = site_list(e);
    } else if (e.key == "symmetry") {
      g.symmetry = site_list(e);
    } else if (e.key == "plaquette") {
      g.plaquette = site_list(e);
    } else if (e.key.rfind("ratio", 0) == 0) {
      const std::string param = trim(e.key.substr(5));
      if (param.find('/') == std::string::npos) cfg.fail(e, "ratio key must look like 'ratio J2/J1'");
      try {
        lf.ratio = parse_double(e.value);
      } catch (const ConfigError& err) {
        cfg.fail(e, err.what());
      }
      ratio_key = std::make_pair(&e, param);
    } else if (!e.key.empty() && e.key[0] == 'J') {
      try {
        couplings[e.key] = parse_double(e.value);
      } catch (const ConfigError& err) {
        cfg.fail(e, err.what());
      }
    } else {
      cfg.fail(e, "unknown key '" + e.key + "'");
    }
  }
  if (bonds.empty()) throw ConfigError(source + ": lattice has no bonds");
  for (auto& b : bonds) {
    const auto it = couplings.find(b.label);
    if (it != couplings.end()) b.coupling = it->second;
  }
  try {
    g.system = SpinSystem(n, bonds);
    if (ratio_key) {
      g.parameter = ratio_key->second;
      g.system = apply_parameter(g.system, g.parameter, *lf.ratio);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& err) {
    throw ConfigError(source + ": " + err.what());
  }
  if (g.ring.empty()) {
    for (int k = 0; k < n; ++k) g.ring.push_back(k);
  }
  if (g.symmetry.empty()) {
    for (int k = 0; k < n; ++k) g.symmetry.push_back(k);
  }
  if (static_cast<int>(g.ring.size()) != n) throw ConfigError(source + ": ring must list every site");
  if (static_cast<int>(g.symmetry.size()) != n) throw ConfigError(source + ": symmetry must list every site");
  return lf;
}

LatticeFile load_lattice(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lattice file " + path.string());
  return parse_lattice(in, path.string());
}

}  // namespace pqs
