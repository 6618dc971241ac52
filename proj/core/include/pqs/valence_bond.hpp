#pragma once

// Dimer coverings, singlet-product states, and decompositions of exact
// ground states over the non-orthogonal valence-bond family.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pqs/spin_lattice.hpp"
#include "pqs/types.hpp"

namespace pqs {

inline constexpr int kMaxCoveringSites = 12;

/// Perfect matching of {0..n-1}; pairs stored with i < j, sorted by i.
class DimerCovering {
 public:
  DimerCovering(int n_sites, std::vector<std::pair<int, int>> pairs);

  int n_sites() const { return n_; }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

  /// Image under the site map k -> perm[k].
  DimerCovering mapped(std::span<const int> perm) const;

  /// "{(1,2),(3,4)}" with 1-based sites.
  std::string to_string() const;

  bool operator==(const DimerCovering&) const = default;

 private:
  int n_;
  std::vector<std::pair<int, int>> pairs_;
};

/// All (n-1)!! perfect matchings, each site paired in turn with every larger
/// free site in ascending order.
std::vector<DimerCovering> enumerate_coverings(int n_sites);

/// Coverings without crossing bonds when sites are placed around `cycle`
/// (a permutation of 0..n-1). These form a basis of the singlet sector.
std::vector<DimerCovering> rumer_coverings(std::span<const int> cycle);

/// Sign carried by the singlet on ordered pair (i, j): (-1)^floor((j - i) / 2).
/// With it the four-site identity Phi_x = Phi_= - Phi_|| holds exactly.
int singlet_sign(int i, int j);

/// Tensor product of signed singlets (|HV> - |VH>)/sqrt(2) over the pairs.
CVector covering_state(const DimerCovering& covering);

struct GramInfo {
  CMatrix gram;
  int rank = 0;
  RVector singular_values;
};

GramInfo gram_rank(std::span<const DimerCovering> coverings, double tol = 1e-10);

/// Normalized combination of coverings (a single covering or a symmetric
/// merge of a covering with its partner).
struct VbElement {
  std::vector<std::pair<DimerCovering, double>> terms;

  CVector state() const;
  std::string to_string() const;
};

VbElement element_of(const DimerCovering& covering);

struct VbDecomposition {
  std::vector<VbElement> basis;
  CVector coefficients;
  double residual = 0.0;

  CVector reconstruct() const;
};

/// Minimal-norm least-squares coefficients over a possibly dependent basis.
VbDecomposition decompose(const CVector& state, std::span<const VbElement> basis);
VbDecomposition decompose(const CVector& state, std::span<const DimerCovering> basis);

/// Throws if `perm` does not map the bond graph onto itself with equal
/// couplings and labels.
void require_automorphism(const SpinSystem& system, std::span<const int> perm);

/// Keeps coverings fixed by the symmetry and merges each covering with its
/// image when the image is also in the list. Coverings whose image is
/// missing are dropped.
std::vector<VbElement> symmetry_allowed_coverings(std::span<const DimerCovering> coverings,
                                                  std::span<const int> perm);
std::vector<VbElement> symmetry_allowed_coverings(std::span<const DimerCovering> coverings,
                                                  std::span<const int> perm,
                                                  const SpinSystem& system);

// ---- four-site square ------------------------------------------------------

/// Phi_= = {(1,2),(3,4)}, Phi_|| = {(1,3),(2,4)}, Phi_x = {(1,4),(2,3)}.
DimerCovering phi_parallel_h();
DimerCovering phi_parallel_v();
DimerCovering phi_cross();

struct PhasePoint {
  double j2_over_j1 = 0.0;
  double j3_over_j1 = 0.0;
  Complex alpha{};  ///< ground = alpha Phi_= + beta Phi_||, phase fixed so the
  Complex beta{};   ///< first nonzero of (alpha, beta) is real positive
  bool degenerate = false;
  double residual = 0.0;
  /// Rescaling making 2(|a|^2 + |b|^2 + |a+b|^2) = 1.
  double dimer_scale = 0.0;
};

PhasePoint four_site_phase_point(double j2_over_j1, double j3_over_j1);
std::vector<PhasePoint> four_site_phase_diagram(std::span<const double> j2_grid,
                                                std::span<const double> j3_grid);

// ---- six-site checkerboard ---------------------------------------------------

struct VbGeometry {
  SpinSystem system;
  std::string parameter = "J2/J1";
  std::vector<int> ring;       ///< reference cycle for the Rumer basis
  std::vector<int> symmetry;   ///< point-group generator, site k -> symmetry[k]
  std::vector<int> plaquette;  ///< uncrossed square in ring order
};

VbGeometry checkerboard_geometry();

/// psi_1..psi_4 for the geometry: symmetry-allowed Rumer elements, labeled
/// by how their coefficients behave at ratio 1 and at large ratio.
std::vector<VbElement> checkerboard_basis(const VbGeometry& geometry);

struct CoefficientRow {
  double ratio = 0.0;
  std::vector<Complex> c;  ///< phase fixed so c[0] is real positive
  double residual = 0.0;
  bool degenerate = false;
};

CoefficientRow checkerboard_coefficients(const VbGeometry& geometry,
                                         std::span<const VbElement> basis, double ratio);
std::vector<CoefficientRow> checkerboard_coefficients(const VbGeometry& geometry,
                                                      std::span<const double> ratios);

/// Fidelity of the reduced state on `plaquette` with the singlet ground
/// state of a uniform Heisenberg ring on those sites.
double plaquette_fidelity(const CVector& state, std::span<const int> plaquette);

/// Nondegenerate ground state of a system; throws NumericalError otherwise.
CVector unique_ground_state(const SpinSystem& system);

}  // namespace pqs
