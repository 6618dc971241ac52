#pragma once

// Density matrices, partial traces, two-qubit concurrence and monogamy.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "pqs/types.hpp"

namespace pqs {

class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-12), unit trace (1e-12) and eigenvalues >= -1e-10.
  explicit DensityMatrix(CMatrix rho);

  static DensityMatrix from_pure(const CVector& psi);

  const CMatrix& matrix() const { return rho_; }
  int n_qubits() const { return n_; }
  Eigen::Index dim() const { return rho_.rows(); }

  /// Tr(rho^2)
  double purity() const;

 private:
  CMatrix rho_;
  int n_ = 0;
};

/// Reduced state on the qubits listed in `keep` (0-based, ascending order
/// in the result regardless of the order given).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);
DensityMatrix partial_trace(const CVector& psi, std::span<const int> keep);

/// Wootters concurrence of a two-qubit state.
double concurrence(const DensityMatrix& rho);

/// sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4), the signed quantity whose
/// positive part is the concurrence.
double concurrence_margin(const DensityMatrix& rho);

using QubitPair = std::pair<int, int>;  // 0-based

struct ConcurrenceProfile {
  std::vector<double> theta;
  std::vector<QubitPair> pairs;
  std::vector<std::vector<double>> values;   ///< values[pair][theta], clipped at 0
  std::vector<std::vector<double>> margins;  ///< signed pre-max quantity

  std::size_t pair_index(QubitPair pair) const;
};

ConcurrenceProfile pairwise_profile(const std::function<CVector(double)>& family,
                                    std::span<const QubitPair> pairs,
                                    std::span<const double> theta_grid);

struct MonogamyResult {
  double sum_c2 = 0.0;  ///< sum over partners of C^2(focus, j)
  double tangle = 0.0;  ///< 4 det(rho_focus)
  bool satisfied = false;
};

/// CKW inequality for qubit `focus` of a pure state.
MonogamyResult monogamy_check(const CVector& psi, int focus, double tol = 1e-9);
/// Rejects mixed input (purity below 1 - 1e-9).
MonogamyResult monogamy_check(const DensityMatrix& rho, int focus, double tol = 1e-9);

struct ZeroCrossing {
  enum class Kind { birth, death, plateau };
  Kind kind;
  double theta;      ///< crossing point; plateau start for intervals
  double theta_end;  ///< equal to theta unless kind == plateau
};

/// Sign changes of the signed margin for one pair, refined linearly.
/// Runs of exactly-zero concurrence are reported as plateau intervals.
std::vector<ZeroCrossing> zero_crossings(const ConcurrenceProfile& profile, QubitPair pair);
std::vector<ZeroCrossing> zero_crossings(std::span<const double> theta,
                                         std::span<const double> margin);

/// <psi| rho |psi>
double state_fidelity(const DensityMatrix& rho, const CVector& psi);

/// (1/2) || a - b ||_1
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace pqs
