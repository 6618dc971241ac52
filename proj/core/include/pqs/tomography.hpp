#pragma once

// Pauli-basis qubit tomography: settings, Poissonian count simulation,
// linear-inversion reconstruction and Monte Carlo error propagation.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pqs/entanglement.hpp"
#include "pqs/types.hpp"

namespace pqs {

enum class PauliBasis : std::uint8_t { X, Y, Z };

/// One local Pauli basis per qubit. Outcome bit k = 0 is the +1 eigenstate
/// of qubit k (H for Z), bit k = 1 the -1 eigenstate.
struct MeasurementSetting {
  std::vector<PauliBasis> bases;

  int n_qubits() const { return static_cast<int>(bases.size()); }
  std::string label() const;  ///< e.g. "XZ"
  static MeasurementSetting parse(const std::string& label);

  /// Rows are the conjugated outcome eigenvectors, so p = |U psi|^2.
  CMatrix rotation() const;

  bool operator==(const MeasurementSetting&) const = default;
};

/// All 3^n settings, qubit 0 varying slowest, X < Y < Z.
std::vector<MeasurementSetting> build_settings(int n_qubits);

/// Outcome probabilities, index = outcome bit string (qubit 0 most significant).
std::vector<double> born_probabilities(const DensityMatrix& rho, const MeasurementSetting& setting);

std::string outcome_string(std::size_t outcome, int n_qubits);

struct CountsTable {
  int n_qubits = 0;
  std::uint64_t seed = 0;
  std::uint64_t events = 0;  ///< expected events per setting
  std::vector<MeasurementSetting> settings;
  std::vector<std::vector<std::uint64_t>> counts;  ///< counts[setting][outcome]

  void validate() const;

  /// Header "# seed=S events=N qubits=n", then setting_id,basis,outcome,count rows.
  void write_csv(std::ostream& out) const;
  static CountsTable read_csv(std::istream& in);
};

/// count ~ Poisson(events * p) per outcome, independent; deterministic in seed.
CountsTable simulate_counts(const DensityMatrix& rho, std::span<const MeasurementSetting> settings,
                            std::uint64_t events, std::uint64_t seed);

/// Linear inversion on Pauli expectations (averaged over every setting that
/// measures them), then eigenvalue clipping and trace renormalization.
DensityMatrix reconstruct(const CountsTable& counts);
DensityMatrix reconstruct_from_probabilities(std::span<const MeasurementSetting> settings,
                                             const std::vector<std::vector<double>>& probabilities);

struct Uncertainty {
  double mean = 0.0;
  double std = 0.0;
  std::vector<double> samples;
};

/// Resamples every count as Poisson(observed), reconstructs, and reports the
/// sample mean and standard deviation of `functional`. Resample r uses the
/// seed derive_seed(seed, r), so results do not depend on evaluation order.
Uncertainty monte_carlo_uncertainty(const CountsTable& counts, int resamples,
                                    const std::function<double(const DensityMatrix&)>& functional,
                                    std::uint64_t seed);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace pqs
