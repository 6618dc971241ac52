#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pqs/entanglement.hpp"

using namespace pqs;

namespace {

CVector singlet() {
  CVector s(4);
  s << 0, 1 / std::sqrt(2.0), -1 / std::sqrt(2.0), 0;
  return s;
}

CVector ket(std::initializer_list<int> bits) {
  CVector v = CVector::Ones(1);
  for (int b : bits) {
    CVector q = CVector::Zero(2);
    q(b) = 1;
    v = kron(v, q);
  }
  return v;
}

CMatrix werner(double p) {
  const CVector s = singlet();
  return p * s * s.adjoint() + (1 - p) * CMatrix::Identity(4, 4) / 4.0;
}

}  // namespace

TEST_CASE("density matrix validation") {
  CHECK_THROWS(DensityMatrix(CMatrix::Identity(4, 4)));
  CMatrix bad = CMatrix::Identity(2, 2) / 2.0;
  bad(0, 1) = 0.3;
  CHECK_THROWS(DensityMatrix(bad));
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.2;
  neg(1, 1) = -0.2;
  CHECK_THROWS(DensityMatrix(neg));
  CHECK_THROWS(DensityMatrix(CMatrix::Identity(3, 3) / 3.0));
  CHECK(DensityMatrix::from_pure(singlet()).purity() == doctest::Approx(1.0));
}

TEST_CASE("partial trace examples") {
  const int k12[] = {0, 1};
  const int k1[] = {0};
  const CVector psi = kron(singlet(), ket({0, 1}));
  CHECK((partial_trace(psi, k12).matrix() - singlet() * singlet().adjoint()).norm() < 1e-14);
  CHECK((partial_trace(singlet(), k1).matrix() - CMatrix::Identity(2, 2) / 2.0).norm() < 1e-14);

  const CVector ghz = (ket({0, 0, 0, 0}) + ket({1, 1, 1, 1})) / std::sqrt(2.0);
  CMatrix expect = CMatrix::Zero(4, 4);
  expect(0, 0) = expect(3, 3) = 0.5;
  CHECK((partial_trace(ghz, k12).matrix() - expect).norm() < 1e-14);

  const int bad[] = {0, 4};
  const int dup[] = {1, 1};
  CHECK_THROWS(partial_trace(ghz, bad));
  CHECK_THROWS(partial_trace(ghz, dup));
  CHECK_THROWS(partial_trace(ghz, std::span<const int>{}));
}

TEST_CASE("property: partial trace agrees with the oracle, composes, and preserves trace") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const CVector psi = oracle::haar_state(16, rng);
    const int keep[] = {1, 3};
    const auto r = partial_trace(psi, keep);
    CHECK((r.matrix() - oracle::partial_trace_keep(psi, {1, 3}, 4)).norm() < 1e-13);
    const int keep3[] = {0, 1, 3};
    const auto r3 = partial_trace(psi, keep3);
    const int inner[] = {1, 2};
    CHECK((partial_trace(r3, inner).matrix() - r.matrix()).norm() < 1e-13);
    CHECK(r.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-14));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(r.matrix());
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    const auto full = DensityMatrix::from_pure(psi);
    CHECK((partial_trace(full, keep).matrix() - r.matrix()).norm() < 1e-13);
  }
}

TEST_CASE("concurrence examples") {
  CHECK(concurrence(DensityMatrix::from_pure(singlet())) == doctest::Approx(1.0));
  CHECK(concurrence(DensityMatrix(CMatrix::Identity(4, 4) / 4.0)) == doctest::Approx(0.0));
  for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
    CHECK(concurrence(DensityMatrix(werner(p))) == doctest::Approx(std::max(0.0, (3 * p - 1) / 2)).epsilon(1e-12));
  }
  CHECK(concurrence(DensityMatrix(werner(0.5))) == doctest::Approx(0.25));
  CHECK_THROWS(concurrence(DensityMatrix::from_pure(ket({0, 0, 0}))));
}

TEST_CASE("property: concurrence agrees with the literal eigenvalue formula") {
  // The oracle takes square roots of eigenvalues that are zero for low-rank
  // states, so its own error is about sqrt(machine epsilon).
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const CMatrix rho = oracle::random_density(4, 1 + trial % 4, rng);
    CHECK(std::abs(concurrence(DensityMatrix(rho)) - oracle::concurrence(rho)) < 1e-6);
  }
}

TEST_CASE("property: concurrence is invariant under local unitaries and bounded") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix rho = oracle::random_density(4, 1 + trial % 3, rng);
    const CMatrix u = kron(oracle::haar_unitary(2, rng), oracle::haar_unitary(2, rng));
    const double c = concurrence(DensityMatrix(rho));
    CMatrix moved = u * rho * u.adjoint();
    moved = 0.5 * (moved + moved.adjoint()).eval();
    CHECK(std::abs(c - concurrence(DensityMatrix(moved))) < 1e-10);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0 + 1e-12);
  }
}

TEST_CASE("property: separable mixtures have zero concurrence") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    CMatrix rho = CMatrix::Zero(4, 4);
    double total = 0;
    for (int k = 0; k < 4; ++k) {
      const double w = u(rng);
      rho += w * kron(oracle::random_density(2, 1 + k % 2, rng), oracle::random_density(2, 1, rng));
      total += w;
    }
    rho /= total;
    rho = 0.5 * (rho + rho.adjoint()).eval();
    CHECK(concurrence(DensityMatrix(rho)) < 1e-10);
  }
}

TEST_CASE("monogamy") {
  const CVector two = kron(singlet(), singlet());
  const auto m = monogamy_check(two, 0);
  CHECK(m.sum_c2 == doctest::Approx(1.0));
  CHECK(m.tangle == doctest::Approx(1.0));
  CHECK(m.satisfied);

  const auto p = monogamy_check(ket({0, 0, 0, 0}), 0);
  CHECK(p.sum_c2 == doctest::Approx(0.0));
  CHECK(p.tangle == doctest::Approx(0.0));
  CHECK(p.satisfied);

  CHECK_THROWS(monogamy_check(DensityMatrix(CMatrix::Identity(16, 16) / 16.0), 0));
  CHECK(monogamy_check(DensityMatrix::from_pure(two), 2).satisfied);
}

TEST_CASE("property: CKW holds on Haar-random four-qubit states") {
  std::mt19937_64 rng(37);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const CVector psi = oracle::haar_state(16, rng);
    if (!monogamy_check(psi, trial % 4).satisfied) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("zero crossings") {
  std::vector<double> x, m;
  for (int k = 0; k <= 100; ++k) {
    x.push_back(k * 0.005);
    m.push_back(x.back() - 0.3);
  }
  auto z = zero_crossings(x, m);
  REQUIRE(z.size() == 1);
  CHECK(z[0].kind == ZeroCrossing::Kind::birth);
  CHECK(std::abs(z[0].theta - 0.3) <= 0.005);

  for (auto& v : m) v = -v;
  z = zero_crossings(x, m);
  REQUIRE(z.size() == 1);
  CHECK(z[0].kind == ZeroCrossing::Kind::death);

  std::vector<double> monotone;
  for (double v : x) monotone.push_back(0.2 + v);
  CHECK(zero_crossings(x, monotone).empty());

  // Clipped curve with an exact-zero run is a plateau interval.
  std::vector<double> clipped;
  for (double v : x) clipped.push_back(std::max(0.0, v - 0.3));
  z = zero_crossings(x, clipped);
  REQUIRE(z.size() == 1);
  CHECK(z[0].kind == ZeroCrossing::Kind::plateau);
  CHECK(z[0].theta == 0.0);
  CHECK(z[0].theta_end == doctest::Approx(0.3));

  const std::vector<double> coarse = {0.0, 0.05, 0.1};
  const std::vector<double> vals = {-1.0, 0.0, 1.0};
  CHECK_THROWS(zero_crossings(coarse, vals));
}

TEST_CASE("pairwise profile of a family") {
  const auto family = [](double t) {
    CVector psi = std::cos(t) * kron(singlet(), singlet()) +
                  std::sin(t) * kron(ket({0, 0}), ket({1, 1}));
    return CVector(psi / psi.norm());
  };
  const std::vector<double> grid = {0.0, 0.5};
  const QubitPair pairs[] = {{0, 1}, {0, 2}};
  const auto p = pairwise_profile(family, pairs, grid);
  CHECK(p.values[0][0] == doctest::Approx(1.0));
  CHECK(p.values[1][0] == doctest::Approx(0.0));
  CHECK(p.margins[1][0] < 0.0);
  CHECK(p.pair_index({2, 0}) == 1);
  CHECK_THROWS(p.pair_index({1, 3}));
}

TEST_CASE("fidelity and trace distance") {
  const auto a = DensityMatrix::from_pure(singlet());
  const auto mixed = DensityMatrix(CMatrix::Identity(4, 4) / 4.0);
  CHECK(state_fidelity(a, singlet()) == doctest::Approx(1.0));
  CHECK(state_fidelity(mixed, singlet()) == doctest::Approx(0.25));
  CHECK(trace_distance(a, a) == doctest::Approx(0.0));
  CHECK(trace_distance(a, mixed) == doctest::Approx(0.75));
}
