#pragma once

// Line-oriented "key = value" configuration with '#' comments.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pqs/valence_bond.hpp"

namespace pqs {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, const std::string& source = "<config>");
  static ConfigFile load(const std::filesystem::path& path);

  const std::string& source() const { return source_; }
  const std::vector<ConfigEntry>& entries() const { return entries_; }

  /// Last entry for `key`, if any.
  const ConfigEntry* find(const std::string& key) const;
  std::vector<const ConfigEntry*> all(const std::string& key) const;

  /// Throws ConfigError naming the first unknown key and its line.
  void require_known(const std::set<std::string>& allowed) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_grid(const std::string& key, const std::vector<double>& fallback) const;

  /// Error message prefixed with "source:line: ".
  [[noreturn]] void fail(const ConfigEntry& entry, const std::string& message) const;

 private:
  std::string source_;
  std::vector<ConfigEntry> entries_;
};

/// "start stop step" -> start, start + step, ..., stop (inclusive when stop
/// lies on the grid), with every value snapped to a 1e-12 lattice.
std::vector<double> parse_grid(const std::string& text);
std::vector<double> make_grid(double start, double stop, double step);

double parse_double(const std::string& text);
std::uint64_t parse_uint(const std::string& text);

/// Lattice description:
///   sites = N
///   bond = i j Jname        (1-based, repeated)
///   Jname = value           (coupling value, default 1)
///   ratio J2/J1 = x         (sets J2 = x * J1; also names the scan parameter)
///   ring = ...  symmetry = ...  plaquette = ...   (1-based site lists)
struct LatticeFile {
  VbGeometry geometry;
  std::optional<double> ratio;
};

LatticeFile parse_lattice(std::istream& in, const std::string& source = "<lattice>");
LatticeFile load_lattice(const std::filesystem::path& path);

}  // namespace pqs
