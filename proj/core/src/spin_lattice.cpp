#include "pqs/spin_lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "pqs/errors.hpp"

namespace pqs {

SpinSystem::SpinSystem(int n_sites, std::vector<Bond> bonds) : n_sites_(n_sites), bonds_(std::move(bonds)) {
  if (n_sites < 2) throw std::invalid_argument("spin system needs at least 2 sites");
  if (n_sites > kMaxSites) {
    throw std::invalid_argument("dimension overflow: at most " + std::to_string(kMaxSites) + " sites");
  }
  std::set<std::pair<int, int>> seen;
  for (auto& b : bonds_) {
    if (b.i == b.j) throw std::invalid_argument("self-edge on site " + std::to_string(b.i + 1));
    if (b.i > b.j) std::swap(b.i, b.j);
    if (b.i < 0 || b.j >= n_sites) throw std::invalid_argument("bond site out of range");
    if (!std::isfinite(b.coupling)) throw std::invalid_argument("non-finite coupling");
    if (!seen.emplace(b.i, b.j).second) {
      throw std::invalid_argument("duplicate bond (" + std::to_string(b.i + 1) + "," +
                                  std::to_string(b.j + 1) + ")");
    }
  }
}

SpinSystem SpinSystem::with_coupling(const std::string& label, double value) const {
  return with_couplings({{label, value}});
}

SpinSystem SpinSystem::with_couplings(const std::map<std::string, double>& values) const {
  auto bonds = bonds_;
  for (const auto& [label, value] : values) {
    bool found = false;
    for (auto& b : bonds) {
      if (b.label == label) {
        b.coupling = value;
        found = true;
      }
    }
    if (!found) throw std::invalid_argument("no bond carries coupling '" + label + "'");
  }
  return SpinSystem(n_sites_, std::move(bonds));
}

double SpinSystem::coupling(const std::string& label) const {
  for (const auto& b : bonds_) {
    if (b.label == label) return b.coupling;
  }
  throw std::invalid_argument("no bond carries coupling '" + label + "'");
}

double SpinSystem::max_abs_coupling() const {
  double m = 0.0;
  for (const auto& b : bonds_) m = std::max(m, std::abs(b.coupling));
  return m;
}

const Bond* SpinSystem::find_bond(int i, int j) const {
  if (i > j) std::swap(i, j);
  for (const auto& b : bonds_) {
    if (b.i == i && b.j == j) return &b;
  }
  return nullptr;
}

bool SpinSystem::has_bond(int i, int j) const { return find_bond(i, j) != nullptr; }

SpinSystem four_site_square(double j1, double j2, double j3) {
  return SpinSystem(4, {{0, 1, j1, "J1"}, {2, 3, j1, "J1"},
                        {0, 2, j2, "J2"}, {1, 3, j2, "J2"},
                        {0, 3, j3, "J3"}, {1, 2, j3, "J3"}});
}

SpinSystem checkerboard_six_site(double j1, double j2) {
  return SpinSystem(6, {{0, 1, j1, "J1"}, {1, 2, j1, "J1"}, {3, 4, j1, "J1"}, {4, 5, j1, "J1"},
                        {0, 3, j1, "J1"}, {1, 4, j1, "J1"}, {2, 5, j1, "J1"},
                        {0, 4, j2, "J2"}, {1, 3, j2, "J2"}});
}

namespace {

// Applies J S_i.S_j to basis state `s`; diagonal part returned, flip added to out.
template <typename Emit>
void bond_action(std::size_t s, std::size_t bi, std::size_t bj, double J, Emit&& emit) {
  const bool ui = (s & bi) == 0;
  const bool uj = (s & bj) == 0;
  if (ui == uj) {
    emit(s, 0.25 * J);
  } else {
    emit(s, -0.25 * J);
    emit(s ^ bi ^ bj, 0.5 * J);
  }
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

CMatrix build_hamiltonian(const SpinSystem& system) {
  const int n = system.n_sites();
  const auto dim = static_cast<Eigen::Index>(pow2(n));
  CMatrix h = CMatrix::Zero(dim, dim);
  for (const auto& b : system.bonds()) {
    const std::size_t bi = site_bit(n, b.i);
    const std::size_t bj = site_bit(n, b.j);
    for (std::size_t s = 0; s < static_cast<std::size_t>(dim); ++s) {
      bond_action(s, bi, bj, b.coupling, [&](std::size_t t, double v) {
        h(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) += v;
      });
    }
  }
  return h;
}

GroundSpace ground_space(const CMatrix& hamiltonian, double degeneracy_tol) {
  if (hamiltonian.rows() != hamiltonian.cols() || hamiltonian.rows() == 0) {
    throw std::invalid_argument("Hamiltonian must be a non-empty square matrix");
  }
  const double scale = std::max(1.0, hamiltonian.cwiseAbs().maxCoeff());
  if ((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("Hamiltonian is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hamiltonian);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  const auto& w = es.eigenvalues();
  Eigen::Index count = 1;
  while (count < w.size() && w(count) - w(0) <= degeneracy_tol) ++count;
  return GroundSpace{w(0), es.eigenvectors().leftCols(count)};
}

GroundSpace ground_space(const SpinSystem& system) {
  return ground_space(build_hamiltonian(system), 1e-9 * std::max(1.0, system.max_abs_coupling()));
}

SpectrumSlice full_spectrum(const SpinSystem& system) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(build_hamiltonian(system));
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  SpectrumSlice out;
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  out.eigenvectors = es.eigenvectors();
  return out;
}

std::vector<std::size_t> sz_sector_basis(int n_sites, int n_up) {
  std::vector<std::size_t> basis;
  for (std::size_t s = 0; s < pow2(n_sites); ++s) {
    // Down spins are set bits.
    if (n_sites - std::popcount(s) == n_up) basis.push_back(s);
  }
  return basis;
}

SpectrumSlice sz_sector_spectrum(const SpinSystem& system, double sz, int k) {
  const int n = system.n_sites();
  const double up = n / 2.0 + sz;
  if (std::abs(sz) > n / 2.0 || std::abs(up - std::round(up)) > 1e-9) {
    throw std::invalid_argument("empty S^z sector");
  }
  const int n_up = static_cast<int>(std::lround(up));
  const auto basis = sz_sector_basis(n, n_up);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  if (dim == 0 || dim != static_cast<Eigen::Index>(binomial(n, n_up))) {
    throw std::logic_error("sector enumeration mismatch");
  }
  if (k < 1 || k > dim) throw std::invalid_argument("requested more levels than the sector holds");

  std::vector<Eigen::Index> position(pow2(n), -1);
  for (Eigen::Index a = 0; a < dim; ++a) position[basis[static_cast<std::size_t>(a)]] = a;

  CMatrix h = CMatrix::Zero(dim, dim);
  for (const auto& b : system.bonds()) {
    const std::size_t bi = site_bit(n, b.i);
    const std::size_t bj = site_bit(n, b.j);
    for (Eigen::Index a = 0; a < dim; ++a) {
      bond_action(basis[static_cast<std::size_t>(a)], bi, bj, b.coupling,
                  [&](std::size_t t, double v) { h(position[t], a) += v; });
    }
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");

  SpectrumSlice out;
  out.sz = sz;
  out.eigenvectors = CMatrix::Zero(static_cast<Eigen::Index>(pow2(n)), k);
  for (int level = 0; level < k; ++level) {
    out.eigenvalues.push_back(es.eigenvalues()(level));
    for (Eigen::Index a = 0; a < dim; ++a) {
      out.eigenvectors(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(a)]), level) =
          es.eigenvectors()(a, level);
    }
  }
  return out;
}

double total_spin_squared(const CVector& state) {
  const auto dim = static_cast<std::size_t>(state.size());
  if (dim < 2 || !std::has_single_bit(dim)) throw std::invalid_argument("state is not a qubit register");
  if (std::abs(state.norm() - 1.0) > 1e-8) throw std::invalid_argument("state is not normalized");
  const int n = std::countr_zero(dim);

  // S_tot^2 = 3n/4 + 2 sum_{i<j} S_i.S_j
  CVector acc = CVector::Zero(state.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const std::size_t bi = site_bit(n, i);
      const std::size_t bj = site_bit(n, j);
      for (std::size_t s = 0; s < dim; ++s) {
        const Complex a = state(static_cast<Eigen::Index>(s));
        if (a == Complex{}) continue;
        bond_action(s, bi, bj, 2.0, [&](std::size_t t, double v) {
          acc(static_cast<Eigen::Index>(t)) += v * a;
        });
      }
    }
  }
  return 0.75 * n + state.dot(acc).real();
}

CVector permute_sites(const CVector& state, std::span<const int> perm) {
  const auto dim = static_cast<std::size_t>(state.size());
  const int n = std::countr_zero(dim);
  if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("permutation size mismatch");
  std::vector<int> check(perm.begin(), perm.end());
  std::sort(check.begin(), check.end());
  for (int k = 0; k < n; ++k) {
    if (check[static_cast<std::size_t>(k)] != k) throw std::invalid_argument("not a permutation");
  }
  CVector out = CVector::Zero(state.size());
  for (std::size_t s = 0; s < dim; ++s) {
    std::size_t t = 0;
    for (int k = 0; k < n; ++k) {
      if (s & site_bit(n, k)) t |= site_bit(n, perm[static_cast<std::size_t>(k)]);
    }
    out(static_cast<Eigen::Index>(t)) = state(static_cast<Eigen::Index>(s));
  }
  return out;
}

SpinSystem apply_parameter(const SpinSystem& tmpl, const std::string& parameter, double value) {
  const auto slash = parameter.find('/');
  if (slash == std::string::npos) return tmpl.with_coupling(parameter, value);
  const std::string num = parameter.substr(0, slash);
  const std::string den = parameter.substr(slash + 1);
  return tmpl.with_coupling(num, value * tmpl.coupling(den));
}

GapScan minimum_gap_scan(const SpinSystem& tmpl, const std::string& parameter,
                         std::span<const double> grid, std::optional<double> sz, double tol) {
  if (grid.size() < 3) throw std::invalid_argument("gap scan needs at least 3 grid points");
  GapScan out;
  out.gaps.reserve(grid.size());
  for (double x : grid) {
    const SpinSystem sys = apply_parameter(tmpl, parameter, x);
    std::vector<double> levels;
    if (sz) {
      levels = sz_sector_spectrum(sys, *sz, 2).eigenvalues;
    } else {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(build_hamiltonian(sys), Eigen::EigenvaluesOnly);
      levels = {es.eigenvalues()(0), es.eigenvalues()(1)};
    }
    out.gaps.push_back(levels[1] - levels[0]);
  }

  const auto [lo, hi] = std::minmax_element(out.gaps.begin(), out.gaps.end());
  out.flat = (*hi - *lo) <= tol;
  out.degenerate = *hi <= tol;
  out.grid_index = static_cast<std::size_t>(lo - out.gaps.begin());
  out.ratio = grid[out.grid_index];
  out.gap = *lo;

  const std::size_t i = out.grid_index;
  if (!out.flat && i > 0 && i + 1 < grid.size()) {
    const double x0 = grid[i - 1], x1 = grid[i], x2 = grid[i + 1];
    const double y0 = out.gaps[i - 1], y1 = out.gaps[i], y2 = out.gaps[i + 1];
    // Vertex of the interpolating parabola.
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    if (a > 0.0) {
      const double b = d01 - a * (x0 + x1);
      const double xv = std::clamp(-b / (2.0 * a), x0, x2);
      const double yv = y0 + (xv - x0) * (d01 + a * (xv - x1));
      out.ratio = xv;
      out.gap = std::max(0.0, yv);
    }
  }
  return out;
}

}  // namespace pqs
