#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "pqs/config.hpp"
#include "pqs/entanglement.hpp"
#include "pqs/errors.hpp"
#include "pqs/fock_optics.hpp"
#include "pqs/spin_lattice.hpp"
#include "pqs/tomography.hpp"
#include "pqs/valence_bond.hpp"

namespace pqs::cli {

namespace {

namespace fs = std::filesystem;

struct Context {
  const RunConfig& run;
  ConfigFile file;
  fs::path base_dir;

  std::vector<double> grid(const std::string& key, double start, double stop, double step) const {
    return file.get_grid(key, make_grid(start, stop, step));
  }

  bool flag(const std::string& key, bool fallback) const {
    const auto* e = file.find(key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    file.fail(*e, "expected true or false");
  }

  std::vector<std::string> words(const std::string& key, const std::string& fallback) const {
    std::istringstream ss(file.get_string(key, fallback));
    std::vector<std::string> out;
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
  }

  VbGeometry geometry() const {
    const auto* e = file.find("lattice.file");
    if (!e) return checkerboard_geometry();
    fs::path p = e->value;
    if (p.is_relative()) p = base_dir / p;
    return load_lattice(p).geometry;
  }
};

Context load_context(const RunConfig& run, const std::set<std::string>& keys) {
  Context ctx{run, {}, fs::current_path()};
  if (run.config_path) {
    ctx.file = ConfigFile::load(*run.config_path);
    ctx.base_dir = fs::path(*run.config_path).parent_path();
  }
  ctx.file.require_known(keys);
  return ctx;
}

std::string pair_name(int i, int j) { return "c" + std::to_string(i + 1) + std::to_string(j + 1); }

// ---- subcommands ----------------------------------------------------------

Table hom_visibility(const RunConfig& run) {
  const Context ctx = load_context(run, {"eta.grid", "hom.v_sys"});
  const auto etas = ctx.grid("eta.grid", 0.0, 1.0, 0.01);
  const double v_sys = ctx.file.get_double("hom.v_sys", 1.0);
  Table t{{"eta", "theta", "v_ideal", "v_fock", "v_model"}, {}, {}};
  for (double eta : etas) {
    const double ideal = ideal_hom_visibility(eta);
    t.rows.push_back({eta, theta_from_reflectivity(eta), ideal, fock_hom_visibility(eta), v_sys * ideal});
  }
  return t;
}

Table hom_dip(const RunConfig& run) {
  const Context ctx =
      load_context(run, {"hom.etas", "delay.grid", "hom.sigma", "hom.v_sys", "hom.baseline", "hom.noise"});
  std::vector<double> etas;
  for (const auto& w : ctx.words("hom.etas", "0.17 0.5 0.67")) etas.push_back(parse_double(w));
  const auto delays = ctx.grid("delay.grid", -3.0, 3.0, 0.05);
  HomDipModel model{ctx.file.get_double("hom.sigma", 1.0), ctx.file.get_double("hom.v_sys", 0.853),
                    ctx.file.get_double("hom.baseline", 1.0)};
  model.validate();
  const double noise = ctx.file.get_double("hom.noise", 0.0);
  if (noise < 0.0) throw ConfigError("hom.noise must be >= 0");
  std::mt19937_64 rng(run.seed);
  std::normal_distribution<double> gauss;
  Table t{{"eta", "delay", "rate", "rate_noisy"}, {}, {}};
  for (double eta : etas) {
    for (const auto& p : hom_dip_curve(eta, delays, model)) {
      const double noisy = noise > 0.0 ? p.rate * (1.0 + noise * gauss(rng)) : p.rate;
      t.rows.push_back({eta, p.delay, p.rate, noisy});
    }
  }
  return t;
}

Table concurrence_scan(const RunConfig& run) {
  const Context ctx = load_context(run, {"theta.grid", "eta.grid", "source.pair", "tdc.modes", "pattern",
                                         "tdc.convention", "tdc.swap_outputs", "monogamy.focus"});
  std::vector<double> thetas;
  const bool by_eta = ctx.file.find("eta.grid") != nullptr;
  if (by_eta) {
    if (ctx.file.find("theta.grid")) throw ConfigError("give theta.grid or eta.grid, not both");
    for (double eta : ctx.file.get_grid("eta.grid", {})) thetas.push_back(theta_from_reflectivity(eta));
  } else {
    thetas = ctx.grid("theta.grid", 0.0, 0.785, 0.005);
  }

  SourceConfig sources;
  for (const auto* e : ctx.file.all("source.pair")) {
    std::istringstream ss(e->value);
    std::string a, b, kind;
    if (!(ss >> a >> b >> kind)) ctx.file.fail(*e, "source.pair needs 'mode_a mode_b kind'");
    try {
      sources.pairs.push_back({a, b, parse_pair_kind(kind)});
    } catch (const std::invalid_argument& err) {
      ctx.file.fail(*e, err.what());
    }
  }
  if (sources.pairs.empty()) sources = SourceConfig::two_singlets();

  const auto modes = ctx.words("tdc.modes", "1 3");
  if (modes.size() != 2) throw ConfigError("tdc.modes needs two mode ids");
  const auto pattern = ctx.words("pattern", "1 2 3 4");
  TdcSetting base;
  const std::string conv = ctx.file.get_string("tdc.convention", "reciprocal");
  if (conv == "reciprocal") base.convention = PhaseConvention::reciprocal;
  else if (conv == "real-orthogonal") base.convention = PhaseConvention::real_orthogonal;
  else throw ConfigError("tdc.convention must be reciprocal or real-orthogonal");
  base.swap_outputs = ctx.flag("tdc.swap_outputs", false);

  const auto focus_u = ctx.file.get_uint("monogamy.focus", 1);
  if (focus_u < 1 || focus_u > pattern.size()) throw ConfigError("monogamy.focus out of range");
  const int focus = static_cast<int>(focus_u) - 1;
  std::vector<QubitPair> pairs;
  for (int j = 0; j < static_cast<int>(pattern.size()); ++j) {
    if (j != focus) pairs.emplace_back(std::min(focus, j), std::max(focus, j));
  }

  const auto family = [&](double theta) {
    TdcSetting s = base;
    s.reflectivity = std::min(1.0, reflectivity_from_theta(theta));
    return simulate_postselected_state(sources, s, {modes[0], modes[1]}, pattern).state();
  };
  const ConcurrenceProfile profile = pairwise_profile(family, pairs, thetas);

  Table t;
  t.columns = {"theta", "eta"};
  for (const auto& p : pairs) t.columns.push_back(pair_name(p.first, p.second));
  t.columns.insert(t.columns.end(), {"sum_sq", "tau", "monogamy_ok"});
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const MonogamyResult m = monogamy_check(family(thetas[k]), focus);
    std::vector<Cell> row = {thetas[k], reflectivity_from_theta(thetas[k])};
    for (std::size_t p = 0; p < pairs.size(); ++p) row.emplace_back(profile.values[p][k]);
    row.insert(row.end(), {m.sum_c2, m.tangle, m.satisfied});
    t.rows.push_back(std::move(row));
  }

  nlohmann::ordered_json crossings = nlohmann::ordered_json::object();
  for (const auto& p : pairs) {
    try {
      auto list = nlohmann::ordered_json::array();
      for (const auto& z : zero_crossings(profile, p)) {
        const char* kind = z.kind == ZeroCrossing::Kind::birth   ? "birth"
                           : z.kind == ZeroCrossing::Kind::death ? "death"
                                                                 : "plateau";
        list.push_back({{"kind", kind}, {"theta", z.theta}, {"theta_end", z.theta_end}});
      }
      crossings[pair_name(p.first, p.second)] = list;
    } catch (const std::invalid_argument&) {
      crossings[pair_name(p.first, p.second)] = nullptr;  // grid too coarse or irregular
    }
  }
  t.json_extra = nlohmann::ordered_json{{"crossings", crossings}}.dump();
  return t;
}

Table phase_diagram(const RunConfig& run) {
  const Context ctx = load_context(run, {"j2.grid", "j3.grid", "dimer.normalization"});
  const auto j2 = ctx.grid("j2.grid", 0.0, 2.0, 0.05);
  const auto j3 = ctx.grid("j3.grid", 0.0, 2.0, 0.05);
  const bool rescale = ctx.flag("dimer.normalization", false);
  Table t{{"j2_over_j1", "j3_over_j1", "re_alpha", "re_beta", "abs_alpha", "abs_beta", "abs_sum", "degenerate_flag"},
          {}, {}};
  if (rescale) t.columns.push_back("dimer_scale");
  for (const auto& p : four_site_phase_diagram(j2, j3)) {
    std::vector<Cell> row = {p.j2_over_j1, p.j3_over_j1, p.alpha.real(), p.beta.real(), std::abs(p.alpha),
                             std::abs(p.beta), std::abs(p.alpha) + std::abs(p.beta), p.degenerate};
    if (rescale) row.emplace_back(p.dimer_scale);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table checkerboard_spectrum(const RunConfig& run) {
  const Context ctx = load_context(run, {"lattice.file", "ratio.grid", "spectrum.levels", "spectrum.sz"});
  const VbGeometry geo = ctx.geometry();
  const auto ratios = ctx.grid("ratio.grid", 0.0, 2.0, 0.01);
  const auto k = static_cast<int>(ctx.file.get_uint("spectrum.levels", 6));
  const double sz = ctx.file.get_double("spectrum.sz", 0.0);
  Table t;
  t.columns = {"ratio"};
  for (int level = 0; level < k; ++level) t.columns.push_back("e" + std::to_string(level));
  for (double r : ratios) {
    const auto slice = sz_sector_spectrum(apply_parameter(geo.system, geo.parameter, r), sz, k);
    std::vector<Cell> row = {r};
    for (double e : slice.eigenvalues) row.emplace_back(e);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table checkerboard_coefficients_table(const RunConfig& run) {
  const Context ctx = load_context(run, {"lattice.file", "ratio.grid"});
  const VbGeometry geo = ctx.geometry();
  const auto ratios = ctx.grid("ratio.grid", 0.0, 3.0, 0.05);
  Table t{{"j2_over_j1", "c1", "c2", "c3", "c4", "residual"}, {}, {}};
  for (const auto& row : checkerboard_coefficients(geo, ratios)) {
    std::vector<Cell> cells = {row.ratio};
    for (const auto& c : row.c) cells.emplace_back(c.real());
    cells.emplace_back(row.residual);
    t.rows.push_back(std::move(cells));
  }
  return t;
}

CVector demo_state(const std::string& name) {
  const double h = 1.0 / std::numbers::sqrt2;
  CVector v = CVector::Zero(4);
  if (name == "singlet") {
    v << 0, h, -h, 0;
  } else if (name == "phi+") {
    v << h, 0, 0, h;
  } else if (name == "hv") {
    v << 0, 1, 0, 0;
  } else {
    throw ConfigError("tomo.state must be singlet, phi+ or hv");
  }
  return v;
}

Table tomography_demo(const RunConfig& run) {
  const Context ctx = load_context(run, {"tomo.events", "tomo.resamples", "tomo.state"});
  const std::uint64_t events = ctx.file.get_uint("tomo.events", 100000);
  const auto resamples = static_cast<int>(ctx.file.get_uint("tomo.resamples", 50));
  if (events < 1) throw ConfigError("tomo.events must be >= 1");
  const CVector psi = demo_state(ctx.file.get_string("tomo.state", "singlet"));
  const auto truth = DensityMatrix::from_pure(psi);
  const auto counts = simulate_counts(truth, build_settings(2), events, run.seed);
  const auto rec = reconstruct(counts);
  const auto mc = monte_carlo_uncertainty(counts, resamples, [](const DensityMatrix& r) { return concurrence(r); },
                                          derive_seed(run.seed, 0xC0FFEE));
  Table t{{"metric", "value"}, {}, {}};
  t.rows = {
      {std::string("events_per_setting"), static_cast<std::int64_t>(events)},
      {std::string("resamples"), static_cast<std::int64_t>(resamples)},
      {std::string("fidelity"), state_fidelity(rec, psi)},
      {std::string("trace_distance"), trace_distance(rec, truth)},
      {std::string("concurrence_direct"), concurrence(truth)},
      {std::string("concurrence_reconstructed"), concurrence(rec)},
      {std::string("concurrence_mc_mean"), mc.mean},
      {std::string("concurrence_mc_std"), mc.std},
  };
  return t;
}

const std::map<std::string, std::function<Table(const RunConfig&)>>& handlers() {
  static const std::map<std::string, std::function<Table(const RunConfig&)>> h = {
      {"hom-visibility", hom_visibility},
      {"hom-dip", hom_dip},
      {"concurrence-scan", concurrence_scan},
      {"phase-diagram", phase_diagram},
      {"checkerboard-spectrum", checkerboard_spectrum},
      {"checkerboard-coefficients", checkerboard_coefficients_table},
      {"tomography-demo", tomography_demo},
  };
  return h;
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_number(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "1" : "0";
        else if constexpr (std::is_same_v<T, std::string>) return v;
        else return std::to_string(v);
      },
      c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          // Same 12-digit rounding as the CSV so both formats agree.
          return parse_double(format_number(v));
        } else {
          return v;
        }
      },
      c);
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : handlers()) n.push_back(k);
    return n;
  }();
  return names;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

Table compute(const RunConfig& config) {
  const auto it = handlers().find(config.subcommand);
  if (it == handlers().end()) throw ConfigError("unknown subcommand '" + config.subcommand + "'");
  return it->second(config);
}

void write_table(const Table& table, const RunConfig& config, std::ostream& out) {
  if (config.format == Format::csv) {
    for (std::size_t k = 0; k < table.columns.size(); ++k) out << (k ? "," : "") << table.columns[k];
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << cell_text(row[k]);
      out << "\n";
    }
    return;
  }
  nlohmann::ordered_json doc;
  doc["subcommand"] = config.subcommand;
  doc["seed"] = config.seed;
  doc["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t k = 0; k < row.size(); ++k) obj[table.columns[k]] = cell_json(row[k]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  if (table.json_extra) {
    const auto extra = nlohmann::ordered_json::parse(*table.json_extra);
    for (const auto& [k, v] : extra.items()) doc[k] = v;
  }
  out << doc.dump(2) << "\n";
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Table table = compute(config);
    if (config.out_path) {
      std::ofstream file(*config.out_path, std::ios::binary | std::ios::trunc);
      if (!file) throw ConfigError("cannot open output file " + *config.out_path);
      write_table(table, config, file);
      if (!file) throw ConfigError("failed writing " + *config.out_path);
    } else {
      write_table(table, config, out);
    }
    return kOk;
  } catch (const NumericalError& e) {
    err << "pqs: numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::invalid_argument& e) {
    err << "pqs: configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "pqs: numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photonic quantum simulation of small spin systems"};
  RunConfig cfg;
  std::string format = "csv";
  std::string config_path, out_path;
  std::string names;
  for (const auto& n : subcommands()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("subcommand", cfg.subcommand, "One of: " + names)->required();
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--seed", cfg.seed, "RNG seed")->default_val(kDefaultSeed);
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "pqs: " << e.what() << "\n";
    return kConfigError;
  }
  if (!config_path.empty()) cfg.config_path = config_path;
  if (!out_path.empty()) cfg.out_path = out_path;
  cfg.format = format == "json" ? Format::json : Format::csv;
  return run(cfg, out, err);
}

}  // namespace pqs::cli
