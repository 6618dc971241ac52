#pragma once

// Multimode bosonic states, the tunable directional coupler (TDC), and
// coincidence post-selection.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pqs/types.hpp"

namespace pqs {

enum class Polarization : std::uint8_t { H = 0, V = 1 };

/// A single bosonic mode: spatial path, polarization, and an internal
/// (temporal-bin) index used to model partial distinguishability.
struct ModeLabel {
  std::string spatial;
  Polarization polarization = Polarization::H;
  int internal = 0;

  auto operator<=>(const ModeLabel&) const = default;
  bool operator==(const ModeLabel&) const = default;
};

/// Occupation numbers, sorted by mode label, zero counts omitted.
using Occupation = std::vector<std::pair<ModeLabel, int>>;

/// Sparse superposition of Fock occupations. Terms with |amplitude| below
/// kAmplitudeCutoff are dropped, so two equal states compare equal term by term.
class PhotonicState {
 public:
  static constexpr double kAmplitudeCutoff = 1e-14;

  PhotonicState() = default;

  /// The vacuum with the given spatial modes declared.
  static PhotonicState vacuum(std::set<std::string> spatial_modes = {});

  /// One photon in `mode`. Extra spatial modes may be declared as empty ports.
  static PhotonicState single_photon(const ModeLabel& mode,
                                     std::set<std::string> extra_modes = {});

  /// Builds a state from creation-operator monomials: each entry is
  /// (list of created modes, coefficient), acting on the vacuum.
  static PhotonicState from_creation_terms(
      const std::vector<std::pair<std::vector<ModeLabel>, Complex>>& terms,
      std::set<std::string> extra_modes = {});

  const std::map<Occupation, Complex>& terms() const { return terms_; }
  const std::set<std::string>& spatial_modes() const { return modes_; }
  bool has_mode(const std::string& spatial) const { return modes_.contains(spatial); }

  Complex amplitude(const Occupation& occupation) const;
  double squared_norm() const;
  bool empty() const { return terms_.empty(); }

  /// Total photon number; throws if the state mixes photon-number sectors.
  int photon_number() const;

  /// Creation-operator product of two states (tensor product when the
  /// spatial modes are disjoint).
  PhotonicState operator*(const PhotonicState& other) const;
  PhotonicState operator+(const PhotonicState& other) const;
  PhotonicState operator*(Complex scale) const;

  PhotonicState normalized() const;

  /// Applies a linear map on creation operators, a_k^dag -> sum_j M_jk b_j^dag.
  /// Modes absent from `map` are left untouched.
  PhotonicState transform(
      const std::map<ModeLabel, std::vector<std::pair<ModeLabel, Complex>>>& map,
      const std::set<std::string>& new_modes) const;

  /// Swaps H and V on every photon.
  PhotonicState polarization_flipped() const;

 private:
  void add(const Occupation& occupation, Complex amplitude);
  void prune();

  std::map<Occupation, Complex> terms_;
  std::set<std::string> modes_;
};

Occupation make_occupation(std::vector<ModeLabel> photons);

enum class PhaseConvention {
  reciprocal,      ///< a -> t c + i r d,  b -> i r c + t d
  real_orthogonal  ///< a -> t c + r d,    b -> -r c + t d
};

struct TdcSetting {
  double reflectivity = 0.5;
  PhaseConvention convention = PhaseConvention::reciprocal;
  /// Exchange which output port receives the transmitted amplitude.
  bool swap_outputs = false;

  void validate() const;
  double theta() const;
};

/// theta = arctan(sqrt(eta)); eta in [0, 1].
double theta_from_reflectivity(double eta);
double reflectivity_from_theta(double theta);

/// 2 eta (1 - eta) / (1 - 2 eta + 2 eta^2).
double ideal_hom_visibility(double eta);

/// Sends the photons in spatial modes in_a and in_b through the coupler.
/// Outputs default to reusing the input labels (c := in_a, d := in_b).
PhotonicState apply_tdc(const PhotonicState& state, const std::string& in_a,
                        const std::string& in_b, const TdcSetting& setting);
PhotonicState apply_tdc(const PhotonicState& state, const std::string& in_a,
                        const std::string& in_b, const TdcSetting& setting,
                        const std::string& out_c, const std::string& out_d);

/// Result of conditioning on exactly one photon in each pattern mode.
/// Qubit k of the conditional state is the polarization in pattern[k]
/// (H = |0>, V = |1>).
struct PostSelection {
  enum class Status { ok, zero_probability, underflow, mixed };

  double probability = 0.0;
  Status status = Status::zero_probability;
  std::optional<CVector> conditional;
  /// Conditional polarization density matrix (always set when probability > 0).
  std::optional<CMatrix> density;

  /// The pure conditional state. Throws ZeroProbabilityError, UnderflowError
  /// or NumericalError (mixed) when unavailable.
  const CVector& state() const;
};

/// Probability of exactly one photon in each of `pattern`, relative to the
/// squared norm of `state`.
double coincidence_probability(const PhotonicState& state,
                               std::span<const std::string> pattern);

PostSelection coincidence_postselect(const PhotonicState& state,
                                     std::span<const std::string> pattern);

enum class PairKind { singlet, triplet, phi_plus, phi_minus, product_hv };

PairKind parse_pair_kind(const std::string& text);
std::string to_string(PairKind kind);

/// One crystal emitting a photon pair into two spatial modes.
struct PairSource {
  std::string mode_a;
  std::string mode_b;
  PairKind kind = PairKind::singlet;
};

struct SourceConfig {
  std::vector<PairSource> pairs;

  /// Two singlets, photons (1,2) and (3,4).
  static SourceConfig two_singlets();

  void validate() const;
  PhotonicState state() const;
};

/// Composes the sources, interferes one mode pair at the coupler, and
/// post-selects one photon per pattern mode.
PostSelection simulate_postselected_state(const SourceConfig& sources,
                                          const TdcSetting& setting,
                                          const std::pair<std::string, std::string>& interfering,
                                          std::span<const std::string> pattern);

/// Overlap of two photon wavepackets separated by `delay`,
/// exp(-delay^2 / (2 sigma^2)).
double internal_overlap(double delay, double sigma);

/// A photon whose internal state overlaps bin 0 with amplitude `overlap`
/// and spills the remainder into bin 1.
PhotonicState partially_delayed_photon(const std::string& spatial, Polarization pol,
                                       double overlap);

/// Two-fold coincidence probability for two same-polarization photons
/// entering ports a and b with internal overlap `overlap`, from the Fock
/// simulation.
double fock_hom_coincidence(double eta, double overlap, const TdcSetting& convention = {});

/// 1 - P_coinc(overlap = 1) / P_coinc(overlap = 0), from the Fock simulation.
double fock_hom_visibility(double eta, const TdcSetting& convention = {});

struct HomDipModel {
  double sigma = 1.0;
  double v_sys = 1.0;
  double baseline = 1.0;

  void validate() const;
};

struct DipPoint {
  double delay;
  double rate;
};

std::vector<DipPoint> hom_dip_curve(double eta, std::span<const double> delays,
                                    const HomDipModel& model);

struct VisibilityPoint {
  double eta;
  double visibility;
};

/// Least-squares V_sys for V_i ~ V_sys * V_ideal(eta_i).
double fit_vsys(std::span<const VisibilityPoint> points);

}  // namespace pqs
