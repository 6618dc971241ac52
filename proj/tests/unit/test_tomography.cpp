#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pqs/errors.hpp"
#include "pqs/tomography.hpp"

using namespace pqs;

namespace {

CVector singlet() {
  CVector s(4);
  s << 0, 1 / std::sqrt(2.0), -1 / std::sqrt(2.0), 0;
  return s;
}

std::vector<std::vector<double>> noiseless(const DensityMatrix& rho, const std::vector<MeasurementSetting>& s) {
  std::vector<std::vector<double>> p;
  for (const auto& m : s) p.push_back(born_probabilities(rho, m));
  return p;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

}  // namespace

TEST_CASE("settings enumeration") {
  CHECK(build_settings(1).size() == 3);
  CHECK(build_settings(2).size() == 9);
  CHECK(build_settings(4).size() == 81);
  CHECK(build_settings(2)[0].label() == "XX");
  CHECK(build_settings(2)[1].label() == "XY");
  CHECK(build_settings(2)[8].label() == "ZZ");
  CHECK_THROWS(build_settings(0));
  CHECK(MeasurementSetting::parse("ZXY").label() == "ZXY");
  CHECK_THROWS(MeasurementSetting::parse("ZQ"));
}

TEST_CASE("property: outcome projectors are complete and orthogonal") {
  for (const auto& s : build_settings(2)) {
    const CMatrix u = s.rotation();
    CHECK((u * u.adjoint() - CMatrix::Identity(4, 4)).norm() < 1e-14);
  }
}

TEST_CASE("Born probabilities") {
  CVector h(2);
  h << 1, 0;
  const auto rho = DensityMatrix::from_pure(h);
  const auto z = born_probabilities(rho, MeasurementSetting::parse("Z"));
  CHECK(z[0] == doctest::Approx(1.0));
  CHECK(z[1] == doctest::Approx(0.0));
  const auto x = born_probabilities(rho, MeasurementSetting::parse("X"));
  CHECK(x[0] == doctest::Approx(0.5));
  CVector plus_i(2);
  plus_i << 1 / std::sqrt(2.0), Complex(0, 1 / std::sqrt(2.0));
  const auto y = born_probabilities(DensityMatrix::from_pure(plus_i), MeasurementSetting::parse("Y"));
  CHECK(y[0] == doctest::Approx(1.0));
}

TEST_CASE("counts for a Z eigenstate land in one outcome") {
  CVector h(2);
  h << 1, 0;
  const auto settings = build_settings(1);
  const auto t = simulate_counts(DensityMatrix::from_pure(h), settings, 1000, 5);
  CHECK(t.counts[2][1] == 0);
  CHECK(t.counts[2][0] > 800);
  CHECK_THROWS(simulate_counts(DensityMatrix::from_pure(h), settings, 0, 5));
}

TEST_CASE("counts are deterministic in the seed and round-trip through CSV") {
  const auto rho = DensityMatrix::from_pure(singlet());
  const auto s = build_settings(2);
  const auto a = simulate_counts(rho, s, 5000, 99);
  const auto b = simulate_counts(rho, s, 5000, 99);
  const auto c = simulate_counts(rho, s, 5000, 100);
  CHECK(a.counts == b.counts);
  CHECK(a.counts != c.counts);
  std::ostringstream out;
  a.write_csv(out);
  CHECK(out.str().rfind("# seed=99 events=5000 qubits=2\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = CountsTable::read_csv(in);
  CHECK(back.counts == a.counts);
  CHECK(back.seed == 99);
  CHECK(back.events == 5000);
  CHECK(back.settings == a.settings);

  std::istringstream broken("# seed=1 events=2 qubits=1\nsetting_id,basis_string,outcome_string,count\n0,X,0\n");
  CHECK_THROWS(CountsTable::read_csv(broken));
}

TEST_CASE("frequencies converge to Born probabilities") {
  std::mt19937_64 rng(41);
  const auto rho = DensityMatrix(oracle::random_density(4, 2, rng));
  const auto s = build_settings(2);
  const std::uint64_t n = 1'000'000;
  const auto t = simulate_counts(rho, s, n, 3);
  int outside = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto p = born_probabilities(rho, s[k]);
    for (std::size_t o = 0; o < p.size(); ++o) {
      const double mean = static_cast<double>(n) * p[o];
      if (std::abs(static_cast<double>(t.counts[k][o]) - mean) > 3 * std::sqrt(mean) + 1) ++outside;
    }
  }
  // 36 outcomes at 3 sigma: a single excursion is plausible, more is not.
  CHECK(outside <= 1);
}

TEST_CASE("property: noiseless reconstruction is exact for n = 1, 2, 3") {
  std::mt19937_64 rng(43);
  for (int n : {1, 2, 3}) {
    const auto s = build_settings(n);
    for (int trial = 0; trial < 3; ++trial) {
      const int dim = 1 << n;
      const auto rho = DensityMatrix(oracle::random_density(dim, 1 + trial, rng));
      const auto rec = reconstruct_from_probabilities(s, noiseless(rho, s));
      CHECK(trace_distance(rec, rho) < 1e-10);
    }
  }
}

TEST_CASE("four-qubit settings are informationally complete") {
  std::mt19937_64 rng(47);
  const auto s = build_settings(4);
  const auto rho = DensityMatrix::from_pure(oracle::haar_state(16, rng));
  CHECK(trace_distance(reconstruct_from_probabilities(s, noiseless(rho, s)), rho) < 1e-10);
}

TEST_CASE("incomplete settings are rejected") {
  // Each setting is the only one measuring its own two-body Pauli string.
  auto s = build_settings(2);
  s.erase(s.begin() + 4);
  const auto rho = DensityMatrix::from_pure(singlet());
  CHECK_THROWS_AS(reconstruct_from_probabilities(s, noiseless(rho, s)), ConfigError);
  std::vector<MeasurementSetting> zonly = {MeasurementSetting::parse("ZZ")};
  CHECK_THROWS(reconstruct_from_probabilities(zonly, noiseless(rho, zonly)));
}

TEST_CASE("singlet reconstruction fidelity at 1e5 events") {
  const auto rho = DensityMatrix::from_pure(singlet());
  const auto s = build_settings(2);
  std::vector<double> f;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    f.push_back(state_fidelity(reconstruct(simulate_counts(rho, s, 100'000, seed)), singlet()));
  }
  CHECK(median(f) >= 0.99);
}

TEST_CASE("maximally mixed input reconstructs within 3/sqrt(N)") {
  const auto rho = DensityMatrix(CMatrix::Identity(4, 4) / 4.0);
  const auto s = build_settings(2);
  for (std::uint64_t n : {1000ULL, 100000ULL}) {
    std::vector<double> d;
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      d.push_back(trace_distance(reconstruct(simulate_counts(rho, s, n, seed)), rho));
    }
    CHECK(median(d) < 3.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("property: fidelity does not decrease with more events") {
  std::mt19937_64 rng(53);
  const CVector psi = oracle::haar_state(4, rng);
  const auto rho = DensityMatrix::from_pure(psi);
  const auto s = build_settings(2);
  std::vector<double> med;
  for (std::uint64_t n : {1000ULL, 10000ULL, 100000ULL}) {
    std::vector<double> f;
    for (std::uint64_t seed = 0; seed < 21; ++seed) {
      f.push_back(state_fidelity(reconstruct(simulate_counts(rho, s, n, seed)), psi));
    }
    med.push_back(median(f));
  }
  CHECK(med[1] >= med[0]);
  CHECK(med[2] >= med[1]);
}

TEST_CASE("Monte Carlo uncertainty") {
  const auto rho = DensityMatrix::from_pure(singlet());
  const auto s = build_settings(2);
  const auto counts = simulate_counts(rho, s, 10'000, 7);
  const auto tr = monte_carlo_uncertainty(counts, 10, [](const DensityMatrix& r) {
    return r.matrix().trace().real();
  }, 1);
  CHECK(tr.mean == doctest::Approx(1.0));
  CHECK(tr.std < 1e-12);

  const auto cfun = [](const DensityMatrix& r) { return concurrence(r); };
  const auto c = monte_carlo_uncertainty(counts, 100, cfun, 1);
  CHECK(c.std > 0.0);
  CHECK(c.std < 0.1);
  const auto again = monte_carlo_uncertainty(counts, 100, cfun, 1);
  CHECK(again.samples == c.samples);
  CHECK_THROWS(monte_carlo_uncertainty(counts, 1, cfun, 1));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
}
