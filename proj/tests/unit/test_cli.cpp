#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using namespace pqs::cli;

namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name, const std::string& body) {
  const fs::path p = fs::temp_directory_path() / ("pqs_cli_test_" + name);
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pqs");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

double num(const Cell& c) { return std::get<double>(c); }

const std::string kConfigDir = PQS_CONFIG_DIR;

}  // namespace

TEST_CASE("number formatting is fixed at 12 significant digits") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("hom-visibility writes 101 rows with the peak at one half") {
  const auto r = invoke({"hom-visibility"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 102);
  CHECK(l[0] == "eta,theta,v_ideal,v_fock,v_model");
  CHECK(l[51].rfind("0.5,", 0) == 0);
  CHECK(l[51].find(",1,1,1") != std::string::npos);
}

TEST_CASE("checkerboard coefficients vanish at ratio 1") {
  RunConfig cfg;
  cfg.subcommand = "checkerboard-coefficients";
  cfg.config_path = kConfigDir + "/checkerboard-coefficients.cfg";
  const Table t = compute(cfg);
  bool seen = false;
  for (const auto& row : t.rows) {
    if (std::abs(num(row[0]) - 1.0) > 1e-12) continue;
    seen = true;
    CHECK(std::abs(num(row[2])) < 1e-10);
    CHECK(std::abs(num(row[4])) < 1e-10);
    CHECK(std::abs(num(row[1]) - num(row[3])) < 1e-10);
  }
  CHECK(seen);
}

TEST_CASE("default configs reproduce the built-in defaults") {
  for (const std::string sub : {"hom-visibility", "concurrence-scan", "checkerboard-coefficients"}) {
    const auto a = invoke({sub});
    const auto b = invoke({sub, "--config", kConfigDir + "/" + sub + ".cfg"});
    REQUIRE(a.code == 0);
    if (sub == "hom-visibility") continue;  // v_model differs: the config sets v_sys
    CHECK(a.out == b.out);
  }
}

TEST_CASE("same seed gives byte-identical output, a new seed changes noisy output") {
  const auto cfg = temp_file("noise.cfg", "hom.etas = 0.5\ndelay.grid = -1 1 0.5\nhom.noise = 0.01\n");
  const auto a = invoke({"hom-dip", "--config", cfg.string(), "--seed", "7"});
  const auto b = invoke({"hom-dip", "--config", cfg.string(), "--seed", "7"});
  const auto c = invoke({"hom-dip", "--config", cfg.string(), "--seed", "8"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);

  const auto tomo = temp_file("tomo.cfg", "tomo.events = 2000\ntomo.resamples = 5\n");
  CHECK(invoke({"tomography-demo", "--config", tomo.string()}).out ==
        invoke({"tomography-demo", "--config", tomo.string()}).out);
}

TEST_CASE("--out writes the file and --format json parses") {
  const fs::path out = fs::temp_directory_path() / "pqs_cli_test_out.json";
  fs::remove(out);
  const auto r = invoke({"concurrence-scan", "--format", "json", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(out);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"subcommand\": \"concurrence-scan\"") != std::string::npos);
  CHECK(text.find("\"crossings\"") != std::string::npos);
  CHECK(text.find("\"c13\": [") != std::string::npos);
}

TEST_CASE("configuration errors exit 1 with the offending line") {
  const auto bad = temp_file("bad.cfg", "# comment\neta.grid = 0 1 0.1\nhom.v_sys = abc\n");
  const auto r = invoke({"hom-visibility", "--config", bad.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find(":3:") != std::string::npos);

  const auto unknown = temp_file("unknown.cfg", "eta.grid = 0 1 0.1\nbogus = 1\n");
  const auto u = invoke({"hom-visibility", "--config", unknown.string()});
  CHECK(u.code == 1);
  CHECK(u.err.find(":2:") != std::string::npos);

  const auto noeq = temp_file("noeq.cfg", "eta.grid 0 1 0.1\n");
  CHECK(invoke({"hom-visibility", "--config", noeq.string()}).code == 1);

  CHECK(invoke({"no-such-thing"}).code == 1);
  CHECK(invoke({"hom-visibility", "--format", "xml"}).code == 1);
  CHECK(invoke({"hom-visibility", "--config", "/nonexistent/file.cfg"}).code == 1);
  CHECK(invoke({}).code == 1);
}

TEST_CASE("lattice paths resolve relative to the config file") {
  const auto dir = fs::temp_directory_path() / "pqs_cli_lattice";
  fs::create_directories(dir);
  fs::copy_file(kConfigDir + "/square.lattice", dir / "sq.lattice", fs::copy_options::overwrite_existing);
  std::ofstream(dir / "run.cfg") << "lattice.file = sq.lattice\nratio.grid = 0 1 0.5\nspectrum.levels = 2\n";
  const auto r = invoke({"checkerboard-spectrum", "--config", (dir / "run.cfg").string()});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 4);
  CHECK(l[0] == "ratio,e0,e1");
  CHECK(l[1].rfind("0,-1.5,", 0) == 0);  // two decoupled singlets

  std::ofstream(dir / "missing.cfg") << "lattice.file = nope.lattice\n";
  CHECK(invoke({"checkerboard-coefficients", "--config", (dir / "missing.cfg").string()}).code == 1);
}

TEST_CASE("numerical failures exit 2") {
  // Two V photons meet on a balanced coupler: the fourfold pattern never fires.
  const auto cfg = temp_file("hv.cfg",
                             "eta.grid = 0.5 0.5 0.01\nsource.pair = 1 2 hv\nsource.pair = 4 3 hv\n"
                             "tdc.modes = 2 3\n");
  const auto r = invoke({"concurrence-scan", "--config", cfg.string()});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("help exits 0") {
  const auto r = invoke({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--seed") != std::string::npos);
}
