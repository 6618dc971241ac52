#pragma once

// Generalized Heisenberg models on small graphs, H = sum_edges J_ij S_i . S_j
// with S = sigma / 2, solved by dense exact diagonalization.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pqs/types.hpp"

namespace pqs {

inline constexpr int kMaxSites = 14;

struct Bond {
  int i = 0;  ///< 0-based site index, i < j after canonicalization
  int j = 0;
  double coupling = 1.0;
  std::string label;  ///< coupling name ("J1", "J2", ...), may be empty
};

class SpinSystem {
 public:
  SpinSystem(int n_sites, std::vector<Bond> bonds);

  int n_sites() const { return n_sites_; }
  const std::vector<Bond>& bonds() const { return bonds_; }

  /// Copy with every bond carrying `label` set to `value`.
  SpinSystem with_coupling(const std::string& label, double value) const;
  SpinSystem with_couplings(const std::map<std::string, double>& values) const;

  /// Value of the first bond with `label`; throws if none.
  double coupling(const std::string& label) const;
  double max_abs_coupling() const;

  bool has_bond(int i, int j) const;
  const Bond* find_bond(int i, int j) const;

 private:
  int n_sites_;
  std::vector<Bond> bonds_;
};

/// Four-site square: J1 on (0,1),(2,3); J2 on (0,2),(1,3); J3 on (0,3),(1,2).
SpinSystem four_site_square(double j1, double j2, double j3);

/// Six-site checkerboard, sites 0 1 2 / 3 4 5 (row-major), nearest-neighbour J1
/// and cross bonds J2 on the left square {0,1,3,4}.
SpinSystem checkerboard_six_site(double j1, double j2);

CMatrix build_hamiltonian(const SpinSystem& system);

struct GroundSpace {
  double energy = 0.0;
  CMatrix basis;  ///< orthonormal columns spanning the ground eigenspace

  int degeneracy() const { return static_cast<int>(basis.cols()); }
};

/// Lowest eigenvalue and every eigenvector within `degeneracy_tol` of it.
GroundSpace ground_space(const CMatrix& hamiltonian, double degeneracy_tol = 1e-9);
/// Uses the default tolerance 1e-9 * max|J|.
GroundSpace ground_space(const SpinSystem& system);

struct SpectrumSlice {
  std::vector<double> eigenvalues;  ///< ascending
  CMatrix eigenvectors;             ///< full-space columns matching eigenvalues
  std::optional<double> sz;
};

SpectrumSlice full_spectrum(const SpinSystem& system);

/// Lowest `k` levels in the sector sum_i S^z_i = sz.
SpectrumSlice sz_sector_spectrum(const SpinSystem& system, double sz, int k);

/// Basis indices with the given number of up spins (|0> = up), ascending.
std::vector<std::size_t> sz_sector_basis(int n_sites, int n_up);

/// <psi| S_tot^2 |psi> for a normalized state.
double total_spin_squared(const CVector& state);

/// The state with sites relabeled, site k -> perm[k].
CVector permute_sites(const CVector& state, std::span<const int> perm);

struct GapScan {
  double ratio = 0.0;  ///< refined location of the minimum gap
  double gap = 0.0;
  std::size_t grid_index = 0;
  std::vector<double> gaps;  ///< E1 - E0 per grid point
  bool flat = false;         ///< gap constant over the grid
  bool degenerate = false;   ///< ground state degenerate at every grid point
};

/// Scans a coupling ratio such as "J2/J1" (numerator set to ratio times the
/// denominator's template value) or a bare label "J2" (absolute value), and
/// locates the minimum of E1 - E0, refined by a parabola through the
/// neighbouring grid points.
GapScan minimum_gap_scan(const SpinSystem& tmpl, const std::string& parameter,
                         std::span<const double> grid, std::optional<double> sz = std::nullopt,
                         double tol = 1e-9);

/// Applies a "J2/J1" or "J2" parameter value to a template system.
SpinSystem apply_parameter(const SpinSystem& tmpl, const std::string& parameter, double value);

}  // namespace pqs
