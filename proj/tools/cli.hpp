#pragma once

// Figure-oriented command-line harness. Each subcommand reads an optional
// key = value config and writes one table as CSV or JSON.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pqs::cli {

/// Default RNG seed; every stochastic subcommand is a pure function of it.
inline constexpr std::uint64_t kDefaultSeed = 20120917;

enum class Format { csv, json };

struct RunConfig {
  std::string subcommand;
  std::optional<std::string> config_path;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::string> out_path;  ///< stdout when empty
  Format format = Format::csv;
};

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericalError = 2 };

const std::vector<std::string>& subcommands();

using Cell = std::variant<double, std::int64_t, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// Extra JSON-only payload (already serialized), e.g. crossing lists.
  std::optional<std::string> json_extra;
};

/// Runs one subcommand and returns its table; throws on failure.
Table compute(const RunConfig& config);

/// Writes the table in the requested format.
void write_table(const Table& table, const RunConfig& config, std::ostream& out);

/// compute + write, mapping exceptions to exit codes with a message on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11) and runs. Returns the process exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

/// 12 significant digits, '.' decimal point, independent of locale.
std::string format_number(double value);

}  // namespace pqs::cli
