#include "pqs/valence_bond.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pqs/entanglement.hpp"
#include "pqs/errors.hpp"

namespace pqs {

namespace {

void require_permutation(std::span<const int> perm, int n) {
  if (static_cast<int>(perm.size()) != n) {
    throw std::invalid_argument("symmetry must map all " + std::to_string(n) + " sites");
  }
  std::vector<int> sorted(perm.begin(), perm.end());
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < n; ++k) {
    if (sorted[static_cast<std::size_t>(k)] != k) throw std::invalid_argument("symmetry is not a permutation");
  }
}

void enumerate(std::vector<int>& free, std::vector<std::pair<int, int>>& acc, int n,
               std::vector<DimerCovering>& out) {
  if (free.empty()) {
    out.emplace_back(n, acc);
    return;
  }
  const int first = free.front();
  for (std::size_t k = 1; k < free.size(); ++k) {
    const int partner = free[k];
    std::vector<int> rest;
    rest.reserve(free.size() - 2);
    for (std::size_t m = 1; m < free.size(); ++m) {
      if (m != k) rest.push_back(free[m]);
    }
    acc.emplace_back(first, partner);
    enumerate(rest, acc, n, out);
    acc.pop_back();
  }
}

// Rotates the first nonzero entry (in the given order) onto the positive real axis.
void fix_phase(std::vector<Complex>& c) {
  for (const auto& v : c) {
    if (std::abs(v) > 1e-12) {
      const Complex phase = std::conj(v) / std::abs(v);
      for (auto& w : c) w *= phase;
      return;
    }
  }
}

}  // namespace

DimerCovering::DimerCovering(int n_sites, std::vector<std::pair<int, int>> pairs)
    : n_(n_sites), pairs_(std::move(pairs)) {
  if (n_ < 2 || n_ % 2 != 0) throw std::invalid_argument("dimer covering needs an even site count");
  if (static_cast<int>(pairs_.size()) * 2 != n_) throw std::invalid_argument("covering has wrong pair count");
  std::vector<bool> seen(static_cast<std::size_t>(n_), false);
  for (auto& [i, j] : pairs_) {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n_ || i == j) throw std::invalid_argument("covering pair out of range");
    if (seen[static_cast<std::size_t>(i)] || seen[static_cast<std::size_t>(j)]) {
      throw std::invalid_argument("site appears twice in covering");
    }
    seen[static_cast<std::size_t>(i)] = seen[static_cast<std::size_t>(j)] = true;
  }
  std::sort(pairs_.begin(), pairs_.end());
}

DimerCovering DimerCovering::mapped(std::span<const int> perm) const {
  require_permutation(perm, n_);
  std::vector<std::pair<int, int>> out;
  for (const auto& [i, j] : pairs_) {
    out.emplace_back(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return DimerCovering(n_, std::move(out));
}

std::string DimerCovering::to_string() const {
  std::string s = "{";
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    if (k) s += ",";
    s += "(" + std::to_string(pairs_[k].first + 1) + "," + std::to_string(pairs_[k].second + 1) + ")";
  }
  return s + "}";
}

std::vector<DimerCovering> enumerate_coverings(int n_sites) {
  if (n_sites < 2 || n_sites % 2 != 0) throw std::invalid_argument("covering enumeration needs even n");
  if (n_sites > kMaxCoveringSites) throw std::invalid_argument("too many sites for covering enumeration");
  std::vector<int> free(static_cast<std::size_t>(n_sites));
  for (int k = 0; k < n_sites; ++k) free[static_cast<std::size_t>(k)] = k;
  std::vector<std::pair<int, int>> acc;
  std::vector<DimerCovering> out;
  enumerate(free, acc, n_sites, out);
  return out;
}

std::vector<DimerCovering> rumer_coverings(std::span<const int> cycle) {
  const int n = static_cast<int>(cycle.size());
  require_permutation(cycle, n);
  std::vector<int> pos(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) pos[static_cast<std::size_t>(cycle[static_cast<std::size_t>(k)])] = k;

  std::vector<DimerCovering> out;
  for (const auto& c : enumerate_coverings(n)) {
    bool crossing = false;
    const auto& p = c.pairs();
    for (std::size_t a = 0; a < p.size() && !crossing; ++a) {
      int a0 = pos[static_cast<std::size_t>(p[a].first)], a1 = pos[static_cast<std::size_t>(p[a].second)];
      if (a0 > a1) std::swap(a0, a1);
      for (std::size_t b = a + 1; b < p.size(); ++b) {
        const int b0 = pos[static_cast<std::size_t>(p[b].first)];
        const int b1 = pos[static_cast<std::size_t>(p[b].second)];
        const bool in0 = a0 < b0 && b0 < a1;
        const bool in1 = a0 < b1 && b1 < a1;
        if (in0 != in1) {
          crossing = true;
          break;
        }
      }
    }
    if (!crossing) out.push_back(c);
  }
  return out;
}

int singlet_sign(int i, int j) {
  const int d = std::abs(j - i);
  return (d / 2) % 2 == 0 ? 1 : -1;
}

CVector covering_state(const DimerCovering& covering) {
  const int n = covering.n_sites();
  const auto& pairs = covering.pairs();
  const std::size_t m = pairs.size();
  double sign = 1.0;
  for (const auto& [i, j] : pairs) sign *= singlet_sign(i, j);
  const double amp = sign * std::pow(0.5, 0.5 * static_cast<double>(m));

  CVector psi = CVector::Zero(static_cast<Eigen::Index>(pow2(n)));
  // Choice bit 0 puts |HV> on the pair, bit 1 puts -|VH>.
  for (std::size_t choice = 0; choice < (std::size_t{1} << m); ++choice) {
    std::size_t index = 0;
    double s = amp;
    for (std::size_t k = 0; k < m; ++k) {
      const auto [i, j] = pairs[k];
      if (choice >> k & 1U) {
        index |= site_bit(n, i);
        s = -s;
      } else {
        index |= site_bit(n, j);
      }
    }
    psi(static_cast<Eigen::Index>(index)) = s;
  }
  return psi;
}

GramInfo gram_rank(std::span<const DimerCovering> coverings, double tol) {
  if (coverings.empty()) throw std::invalid_argument("gram_rank needs at least one covering");
  const auto k = static_cast<Eigen::Index>(coverings.size());
  CMatrix b(static_cast<Eigen::Index>(pow2(coverings.front().n_sites())), k);
  for (Eigen::Index c = 0; c < k; ++c) b.col(c) = covering_state(coverings[static_cast<std::size_t>(c)]);
  GramInfo g;
  g.gram = b.adjoint() * b;
  Eigen::JacobiSVD<CMatrix> svd(g.gram);
  g.singular_values = svd.singularValues();
  g.rank = static_cast<int>((g.singular_values.array() > tol).count());
  return g;
}

CVector VbElement::state() const {
  if (terms.empty()) throw std::invalid_argument("empty valence-bond element");
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(pow2(terms.front().first.n_sites())));
  for (const auto& [c, w] : terms) psi += w * covering_state(c);
  return psi;
}

std::string VbElement::to_string() const {
  std::string s;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (k) s += terms[k].second < 0 ? " - " : " + ";
    s += terms[k].first.to_string();
  }
  return s;
}

VbElement element_of(const DimerCovering& covering) { return VbElement{{{covering, 1.0}}}; }

CVector VbDecomposition::reconstruct() const {
  CVector psi = CVector::Zero(basis.front().state().size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    psi += coefficients(static_cast<Eigen::Index>(k)) * basis[k].state();
  }
  return psi;
}

VbDecomposition decompose(const CVector& state, std::span<const VbElement> basis) {
  if (basis.empty()) throw std::invalid_argument("decomposition basis is empty");
  if (std::abs(state.norm() - 1.0) > 1e-8) throw std::invalid_argument("state is not normalized");
  const auto k = static_cast<Eigen::Index>(basis.size());
  CMatrix b(state.size(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const CVector col = basis[static_cast<std::size_t>(c)].state();
    if (col.size() != state.size()) throw std::invalid_argument("basis and state sizes differ");
    b.col(c) = col;
  }
  Eigen::JacobiSVD<CMatrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  VbDecomposition d;
  d.basis.assign(basis.begin(), basis.end());
  d.coefficients = svd.solve(state);
  d.residual = (state - b * d.coefficients).norm();
  return d;
}

VbDecomposition decompose(const CVector& state, std::span<const DimerCovering> basis) {
  std::vector<VbElement> elements;
  for (const auto& c : basis) elements.push_back(element_of(c));
  return decompose(state, elements);
}

void require_automorphism(const SpinSystem& system, std::span<const int> perm) {
  require_permutation(perm, system.n_sites());
  for (const auto& b : system.bonds()) {
    const Bond* image = system.find_bond(perm[static_cast<std::size_t>(b.i)], perm[static_cast<std::size_t>(b.j)]);
    if (image == nullptr || image->label != b.label || image->coupling != b.coupling) {
      throw ConfigError("symmetry is not an automorphism of the coupling graph: bond (" +
                        std::to_string(b.i + 1) + "," + std::to_string(b.j + 1) + ") has no matching image");
    }
  }
}

std::vector<VbElement> symmetry_allowed_coverings(std::span<const DimerCovering> coverings,
                                                  std::span<const int> perm) {
  // A covering fixed as a matching is an eigenstate of the site permutation
  // with eigenvalue +-1 (pair orientations may flip). Merged partners are
  // combined into the same parity sector as the fixed coverings.
  double parity = 0.0;
  for (const auto& c : coverings) {
    if (c.mapped(perm) != c) continue;
    const CVector s = covering_state(c);
    const double p = s.dot(permute_sites(s, perm)).real() >= 0.0 ? 1.0 : -1.0;
    if (parity == 0.0) parity = p;
    else if (parity != p) throw NumericalError("fixed coverings fall in different parity sectors");
  }
  if (parity == 0.0) parity = 1.0;

  std::vector<VbElement> out;
  std::vector<bool> used(coverings.size(), false);
  for (std::size_t a = 0; a < coverings.size(); ++a) {
    if (used[a]) continue;
    const DimerCovering image = coverings[a].mapped(perm);
    if (image == coverings[a]) {
      used[a] = true;
      out.push_back(element_of(coverings[a]));
      continue;
    }
    const auto it = std::find(coverings.begin(), coverings.end(), image);
    if (it == coverings.end()) continue;
    const auto b = static_cast<std::size_t>(it - coverings.begin());
    used[a] = used[b] = true;
    // P psi_a = sign * psi_b, so psi_a + parity * P psi_a has the wanted parity.
    const CVector moved = permute_sites(covering_state(coverings[a]), perm);
    const double sign = moved.dot(covering_state(coverings[b])).real() >= 0.0 ? 1.0 : -1.0;
    VbElement e{{{coverings[a], 1.0}, {coverings[b], parity * sign}}};
    const double norm = e.state().norm();
    for (auto& t : e.terms) t.second /= norm;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<VbElement> symmetry_allowed_coverings(std::span<const DimerCovering> coverings,
                                                  std::span<const int> perm,
                                                  const SpinSystem& system) {
  require_automorphism(system, perm);
  return symmetry_allowed_coverings(coverings, perm);
}

DimerCovering phi_parallel_h() { return DimerCovering(4, {{0, 1}, {2, 3}}); }
DimerCovering phi_parallel_v() { return DimerCovering(4, {{0, 2}, {1, 3}}); }
DimerCovering phi_cross() { return DimerCovering(4, {{0, 3}, {1, 2}}); }

CVector unique_ground_state(const SpinSystem& system) {
  const GroundSpace g = ground_space(system);
  if (g.degeneracy() != 1) {
    throw NumericalError("ground state is " + std::to_string(g.degeneracy()) + "-fold degenerate");
  }
  return g.basis.col(0);
}

PhasePoint four_site_phase_point(double j2_over_j1, double j3_over_j1) {
  if (j2_over_j1 < 0.0 || j3_over_j1 < 0.0) throw std::invalid_argument("coupling ratios must be >= 0");
  PhasePoint p;
  p.j2_over_j1 = j2_over_j1;
  p.j3_over_j1 = j3_over_j1;
  const GroundSpace g = ground_space(four_site_square(1.0, j2_over_j1, j3_over_j1));
  if (g.degeneracy() != 1) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    p.degenerate = true;
    p.alpha = p.beta = Complex{nan, nan};
    p.residual = p.dimer_scale = nan;
    return p;
  }
  const DimerCovering basis[2] = {phi_parallel_h(), phi_parallel_v()};
  const VbDecomposition d = decompose(CVector(g.basis.col(0)), basis);
  std::vector<Complex> c = {d.coefficients(0), d.coefficients(1)};
  fix_phase(c);
  p.alpha = c[0];
  p.beta = c[1];
  p.residual = d.residual;
  p.dimer_scale = 1.0 / std::sqrt(2.0 * (std::norm(p.alpha) + std::norm(p.beta) + std::norm(p.alpha + p.beta)));
  return p;
}

std::vector<PhasePoint> four_site_phase_diagram(std::span<const double> j2_grid,
                                                std::span<const double> j3_grid) {
  std::vector<PhasePoint> out;
  out.reserve(j2_grid.size() * j3_grid.size());
  for (double j2 : j2_grid) {
    for (double j3 : j3_grid) out.push_back(four_site_phase_point(j2, j3));
  }
  return out;
}

VbGeometry checkerboard_geometry() {
  return VbGeometry{checkerboard_six_site(1.0, 1.0), "J2/J1", {0, 1, 2, 5, 4, 3}, {3, 4, 5, 0, 1, 2},
                    {1, 2, 5, 4}};
}

std::vector<VbElement> checkerboard_basis(const VbGeometry& geometry) {
  const auto rumer = rumer_coverings(geometry.ring);
  auto elements = symmetry_allowed_coverings(rumer, geometry.symmetry, geometry.system);
  if (elements.size() != 4) {
    throw ConfigError("symmetry screen leaves " + std::to_string(elements.size()) +
                      " coverings; the checkerboard labeling needs 4");
  }
  auto magnitudes = [&](double ratio) {
    const CVector g = unique_ground_state(apply_parameter(geometry.system, geometry.parameter, ratio));
    const VbDecomposition d = decompose(g, elements);
    if (d.residual > 1e-8) throw NumericalError("ground state leaves the symmetric covering span");
    std::vector<double> m;
    for (Eigen::Index k = 0; k < d.coefficients.size(); ++k) m.push_back(std::abs(d.coefficients(k)));
    return m;
  };

  const auto at_one = magnitudes(1.0);
  std::vector<std::size_t> vanishing, surviving;
  for (std::size_t k = 0; k < 4; ++k) (at_one[k] < 1e-8 ? vanishing : surviving).push_back(k);
  if (vanishing.size() != 2) throw NumericalError("expected two coverings to vanish at ratio 1");

  const auto at_large = magnitudes(4.0);
  if (at_large[vanishing[1]] > at_large[vanishing[0]]) std::swap(vanishing[0], vanishing[1]);
  const double ref = at_large[vanishing[0]];
  if (std::abs(at_large[surviving[1]] - ref) < std::abs(at_large[surviving[0]] - ref)) {
    std::swap(surviving[0], surviving[1]);
  }
  return {elements[surviving[0]], elements[vanishing[0]], elements[surviving[1]], elements[vanishing[1]]};
}

CoefficientRow checkerboard_coefficients(const VbGeometry& geometry, std::span<const VbElement> basis,
                                         double ratio) {
  CoefficientRow row;
  row.ratio = ratio;
  const GroundSpace g = ground_space(apply_parameter(geometry.system, geometry.parameter, ratio));
  if (g.degeneracy() != 1) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.degenerate = true;
    row.c.assign(basis.size(), Complex{nan, nan});
    row.residual = nan;
    return row;
  }
  const VbDecomposition d = decompose(CVector(g.basis.col(0)), basis);
  row.c.assign(d.coefficients.data(), d.coefficients.data() + d.coefficients.size());
  fix_phase(row.c);
  row.residual = d.residual;
  return row;
}

std::vector<CoefficientRow> checkerboard_coefficients(const VbGeometry& geometry,
                                                      std::span<const double> ratios) {
  const auto basis = checkerboard_basis(geometry);
  std::vector<CoefficientRow> out;
  out.reserve(ratios.size());
  for (double r : ratios) out.push_back(checkerboard_coefficients(geometry, basis, r));
  return out;
}

double plaquette_fidelity(const CVector& state, std::span<const int> plaquette) {
  const int m = static_cast<int>(plaquette.size());
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("plaquette needs an even number of sites");
  std::vector<int> sorted(plaquette.begin(), plaquette.end());
  std::sort(sorted.begin(), sorted.end());
  auto local = [&](int site) {
    return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), site) - sorted.begin());
  };
  std::vector<Bond> bonds;
  for (int k = 0; k < m; ++k) {
    const int a = local(plaquette[static_cast<std::size_t>(k)]);
    const int b = local(plaquette[static_cast<std::size_t>((k + 1) % m)]);
    const bool dup = std::any_of(bonds.begin(), bonds.end(), [&](const Bond& x) {
      return (x.i == a && x.j == b) || (x.i == b && x.j == a);
    });
    if (!dup) bonds.push_back({a, b, 1.0, "J"});
  }
  const CVector ring_ground = unique_ground_state(SpinSystem(m, std::move(bonds)));
  return state_fidelity(partial_trace(state, sorted), ring_ground);
}

}  // namespace pqs
