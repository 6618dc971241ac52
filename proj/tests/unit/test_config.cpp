#include <doctest.h>

#include <sstream>

#include "pqs/config.hpp"
#include "pqs/errors.hpp"

using namespace pqs;

TEST_CASE("key = value parsing") {
  std::istringstream in("# header\n  eta.grid = 0 1 0.5   # trailing\n\ntomo.events=100\ntomo.events = 200\n");
  const auto cfg = ConfigFile::parse(in, "t.cfg");
  CHECK(cfg.entries().size() == 3);
  CHECK(cfg.get_uint("tomo.events", 0) == 200);
  CHECK(cfg.all("tomo.events").size() == 2);
  CHECK(cfg.get_grid("eta.grid", {}) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(cfg.get_double("missing", 4.5) == 4.5);
  CHECK_NOTHROW(cfg.require_known({"eta.grid", "tomo.events"}));
  try {
    cfg.require_known({"eta.grid"});
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("t.cfg:4") != std::string::npos);
  }
}

TEST_CASE("malformed lines carry line numbers") {
  std::istringstream in("a = 1\nthis line has no equals\n");
  try {
    (void)ConfigFile::parse(in, "bad.cfg");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "bad.cfg:2: expected 'key = value'");
  }
  std::istringstream num("x = 1.5.2\n");
  const auto cfg = ConfigFile::parse(num, "n.cfg");
  CHECK_THROWS_WITH_AS(cfg.get_double("x", 0), doctest::Contains("n.cfg:1"), ConfigError);
}

TEST_CASE("grids snap to a 1e-12 lattice and include the endpoint") {
  const auto g = parse_grid("0 1 0.01");
  CHECK(g.size() == 101);
  CHECK(g[17] == 0.17);
  CHECK(g.back() == 1.0);
  CHECK(parse_grid("0.5 1.5 0.01").size() == 101);
  CHECK(parse_grid("0 0.3 0.005").back() == 0.3);
  CHECK_THROWS_AS(parse_grid("0 1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1 0 0.1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0 1 0"), ConfigError);
}

TEST_CASE("lattice files") {
  std::istringstream in(R"(# checkerboard
sites = 6
bond = 1 2 J1
bond = 2 3 J1
bond = 4 5 J1
bond = 5 6 J1
bond = 1 4 J1
bond = 2 5 J1
bond = 3 6 J1
bond = 1 5 J2
bond = 2 4 J2
J1 = 1.0
ratio J2/J1 = 1.0
ring = 1 2 3 6 5 4
symmetry = 4 5 6 1 2 3
plaquette = 2 3 6 5
)");
  const auto lf = parse_lattice(in, "cb.lattice");
  const auto ref = checkerboard_geometry();
  CHECK(lf.geometry.system.n_sites() == 6);
  CHECK(lf.geometry.system.bonds().size() == 9);
  CHECK(lf.geometry.parameter == "J2/J1");
  CHECK(lf.ratio == 1.0);
  CHECK(lf.geometry.ring == ref.ring);
  CHECK(lf.geometry.symmetry == ref.symmetry);
  CHECK(lf.geometry.plaquette == ref.plaquette);
  CHECK(lf.geometry.system.coupling("J2") == 1.0);

  std::istringstream self("sites = 3\nbond = 1 1 J\n");
  CHECK_THROWS_AS(parse_lattice(self), ConfigError);
  std::istringstream range("sites = 3\nbond = 1 4 J\n");
  CHECK_THROWS_WITH_AS(parse_lattice(range, "r"), doctest::Contains("r:2"), ConfigError);
  std::istringstream dup("sites = 3\nbond = 1 2 J\nbond = 2 1 J\n");
  CHECK_THROWS_AS(parse_lattice(dup), ConfigError);
  std::istringstream unknown("sites = 3\nbond = 1 2 J\nwidth = 4\n");
  CHECK_THROWS_AS(parse_lattice(unknown), ConfigError);
}
