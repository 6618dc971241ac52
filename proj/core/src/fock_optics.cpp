#include "pqs/fock_optics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pqs/errors.hpp"

namespace pqs {

namespace {

double sqrt_factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return std::sqrt(f);
}

std::vector<ModeLabel> expand_photons(const Occupation& occupation) {
  std::vector<ModeLabel> photons;
  for (const auto& [mode, count] : occupation) {
    for (int k = 0; k < count; ++k) photons.push_back(mode);
  }
  return photons;
}

// Fock amplitude A of |n> corresponds to the monomial coefficient A / prod sqrt(n_k!).
double monomial_scale(const Occupation& occupation) {
  double s = 1.0;
  for (const auto& [mode, count] : occupation) s *= sqrt_factorial(count);
  return s;
}

void check_reflectivity(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("reflectivity must lie in [0, 1], got " + std::to_string(eta));
  }
}

}  // namespace

Occupation make_occupation(std::vector<ModeLabel> photons) {
  std::sort(photons.begin(), photons.end());
  Occupation occ;
  for (auto& p : photons) {
    if (!occ.empty() && occ.back().first == p) {
      ++occ.back().second;
    } else {
      occ.emplace_back(std::move(p), 1);
    }
  }
  return occ;
}

PhotonicState PhotonicState::vacuum(std::set<std::string> spatial_modes) {
  PhotonicState s;
  s.modes_ = std::move(spatial_modes);
  s.terms_[Occupation{}] = 1.0;
  return s;
}

PhotonicState PhotonicState::single_photon(const ModeLabel& mode,
                                           std::set<std::string> extra_modes) {
  return from_creation_terms({{{mode}, Complex{1.0}}}, std::move(extra_modes));
}

PhotonicState PhotonicState::from_creation_terms(
    const std::vector<std::pair<std::vector<ModeLabel>, Complex>>& terms,
    std::set<std::string> extra_modes) {
  PhotonicState s;
  s.modes_ = std::move(extra_modes);
  for (const auto& [photons, coeff] : terms) {
    for (const auto& p : photons) s.modes_.insert(p.spatial);
    Occupation occ = make_occupation(photons);
    s.add(occ, coeff * monomial_scale(occ));
  }
  s.prune();
  return s;
}

Complex PhotonicState::amplitude(const Occupation& occupation) const {
  auto it = terms_.find(occupation);
  return it == terms_.end() ? Complex{} : it->second;
}

double PhotonicState::squared_norm() const {
  double n = 0.0;
  for (const auto& [occ, amp] : terms_) n += std::norm(amp);
  return n;
}

int PhotonicState::photon_number() const {
  std::optional<int> number;
  for (const auto& [occ, amp] : terms_) {
    int n = 0;
    for (const auto& [mode, count] : occ) n += count;
    if (number && *number != n) {
      throw std::logic_error("state mixes photon-number sectors");
    }
    number = n;
  }
  return number.value_or(0);
}

PhotonicState PhotonicState::operator*(const PhotonicState& other) const {
  PhotonicState out;
  out.modes_ = modes_;
  out.modes_.insert(other.modes_.begin(), other.modes_.end());
  for (const auto& [occ_a, amp_a] : terms_) {
    const auto photons_a = expand_photons(occ_a);
    const double scale_a = monomial_scale(occ_a);
    for (const auto& [occ_b, amp_b] : other.terms_) {
      auto photons = photons_a;
      const auto photons_b = expand_photons(occ_b);
      photons.insert(photons.end(), photons_b.begin(), photons_b.end());
      Occupation occ = make_occupation(std::move(photons));
      const Complex coeff = (amp_a / scale_a) * (amp_b / monomial_scale(occ_b));
      out.add(occ, coeff * monomial_scale(occ));
    }
  }
  out.prune();
  return out;
}

PhotonicState PhotonicState::operator+(const PhotonicState& other) const {
  PhotonicState out = *this;
  out.modes_.insert(other.modes_.begin(), other.modes_.end());
  for (const auto& [occ, amp] : other.terms_) out.add(occ, amp);
  out.prune();
  return out;
}

PhotonicState PhotonicState::operator*(Complex scale) const {
  PhotonicState out;
  out.modes_ = modes_;
  for (const auto& [occ, amp] : terms_) out.add(occ, amp * scale);
  out.prune();
  return out;
}

PhotonicState PhotonicState::normalized() const {
  const double n = squared_norm();
  if (n == 0.0) throw NumericalError("cannot normalize the zero state");
  return *this * Complex{1.0 / std::sqrt(n)};
}

PhotonicState PhotonicState::transform(
    const std::map<ModeLabel, std::vector<std::pair<ModeLabel, Complex>>>& map,
    const std::set<std::string>& new_modes) const {
  PhotonicState out;
  out.modes_ = modes_;
  out.modes_.insert(new_modes.begin(), new_modes.end());

  for (const auto& [occ, amp] : terms_) {
    // Expand prod_k (sum_j M_jk b_j^dag) photon by photon.
    std::vector<std::pair<std::vector<ModeLabel>, Complex>> partial{{{}, amp / monomial_scale(occ)}};
    for (const auto& photon : expand_photons(occ)) {
      auto it = map.find(photon);
      std::vector<std::pair<std::vector<ModeLabel>, Complex>> next;
      if (it == map.end()) {
        for (auto& [photons, c] : partial) {
          photons.push_back(photon);
          next.emplace_back(std::move(photons), c);
        }
      } else {
        for (const auto& [photons, c] : partial) {
          for (const auto& [target, m] : it->second) {
            auto extended = photons;
            extended.push_back(target);
            next.emplace_back(std::move(extended), c * m);
          }
        }
      }
      partial = std::move(next);
    }
    for (auto& [photons, c] : partial) {
      Occupation out_occ = make_occupation(std::move(photons));
      out.add(out_occ, c * monomial_scale(out_occ));
    }
  }
  out.prune();
  return out;
}

PhotonicState PhotonicState::polarization_flipped() const {
  PhotonicState out;
  out.modes_ = modes_;
  for (const auto& [occ, amp] : terms_) {
    auto photons = expand_photons(occ);
    for (auto& p : photons) {
      p.polarization = p.polarization == Polarization::H ? Polarization::V : Polarization::H;
    }
    out.add(make_occupation(std::move(photons)), amp);
  }
  out.prune();
  return out;
}

void PhotonicState::add(const Occupation& occupation, Complex amplitude) {
  terms_[occupation] += amplitude;
}

void PhotonicState::prune() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kAmplitudeCutoff; });
}

void TdcSetting::validate() const { check_reflectivity(reflectivity); }

double TdcSetting::theta() const { return theta_from_reflectivity(reflectivity); }

double theta_from_reflectivity(double eta) {
  check_reflectivity(eta);
  return std::atan(std::sqrt(eta));
}

double reflectivity_from_theta(double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 4 + 1e-15)) {
    throw std::invalid_argument("TDC angle must lie in [0, pi/4]");
  }
  const double t = std::tan(theta);
  return std::min(1.0, t * t);
}

double ideal_hom_visibility(double eta) {
  check_reflectivity(eta);
  return 2.0 * eta * (1.0 - eta) / (1.0 - 2.0 * eta + 2.0 * eta * eta);
}

PhotonicState apply_tdc(const PhotonicState& state, const std::string& in_a,
                        const std::string& in_b, const TdcSetting& setting) {
  return apply_tdc(state, in_a, in_b, setting, in_a, in_b);
}

PhotonicState apply_tdc(const PhotonicState& state, const std::string& in_a,
                        const std::string& in_b, const TdcSetting& setting,
                        const std::string& out_c, const std::string& out_d) {
  setting.validate();
  if (in_a == in_b || out_c == out_d) {
    throw std::invalid_argument("coupler ports must be distinct");
  }
  for (const auto& m : {in_a, in_b}) {
    if (!state.has_mode(m)) throw std::invalid_argument("unknown mode-id '" + m + "'");
  }

  const double t = std::sqrt(1.0 - setting.reflectivity);
  const double r = std::sqrt(setting.reflectivity);
  Complex a_to_c{t}, a_to_d, b_to_c, b_to_d{t};
  if (setting.convention == PhaseConvention::reciprocal) {
    a_to_d = kI * r;
    b_to_c = kI * r;
  } else {
    a_to_d = r;
    b_to_c = -r;
  }
  std::string c = out_c;
  std::string d = out_d;
  if (setting.swap_outputs) std::swap(c, d);

  // Collect every internal/polarization label used on the input ports.
  std::set<std::pair<Polarization, int>> inner;
  for (const auto& [occ, amp] : state.terms()) {
    for (const auto& [mode, count] : occ) {
      if (mode.spatial == in_a || mode.spatial == in_b) inner.emplace(mode.polarization, mode.internal);
    }
  }

  std::map<ModeLabel, std::vector<std::pair<ModeLabel, Complex>>> map;
  for (const auto& [pol, internal] : inner) {
    const ModeLabel oc{c, pol, internal};
    const ModeLabel od{d, pol, internal};
    map[ModeLabel{in_a, pol, internal}] = {{oc, a_to_c}, {od, a_to_d}};
    map[ModeLabel{in_b, pol, internal}] = {{oc, b_to_c}, {od, b_to_d}};
  }
  return state.transform(map, {out_c, out_d});
}

const CVector& PostSelection::state() const {
  switch (status) {
    case Status::ok:
      return *conditional;
    case Status::zero_probability:
      throw ZeroProbabilityError("post-selected event has zero probability");
    case Status::underflow:
      throw UnderflowError("post-selection probability underflows double precision");
    case Status::mixed:
      throw NumericalError("conditional polarization state is mixed; use the density matrix");
  }
  throw std::logic_error("unreachable");
}

namespace {

struct Projection {
  double selected_norm = 0.0;
  std::map<Occupation, CVector> branches;  // environment -> polarization amplitudes
};

Projection project_one_per_mode(const PhotonicState& state, std::span<const std::string> pattern) {
  const int n = static_cast<int>(pattern.size());
  if (n == 0) throw std::invalid_argument("empty post-selection pattern");
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (!state.has_mode(pattern[i])) {
      throw std::invalid_argument("unknown mode-id '" + pattern[i] + "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (pattern[i] == pattern[j]) throw std::invalid_argument("duplicate pattern mode");
    }
  }

  Projection proj;
  for (const auto& [occ, amp] : state.terms()) {
    std::vector<int> seen(n, 0);
    std::size_t index = 0;
    std::vector<ModeLabel> environment;
    bool ok = true;
    for (const auto& [mode, count] : occ) {
      auto it = std::find(pattern.begin(), pattern.end(), mode.spatial);
      if (it == pattern.end()) {
        for (int k = 0; k < count; ++k) environment.push_back(mode);
        continue;
      }
      const int q = static_cast<int>(it - pattern.begin());
      seen[q] += count;
      if (seen[q] > 1) {
        ok = false;
        break;
      }
      if (mode.polarization == Polarization::V) index |= site_bit(n, q);
      // Internal bins of detected photons are traced out with the rest.
      environment.push_back(ModeLabel{"#" + std::to_string(q), Polarization::H, mode.internal});
    }
    if (!ok || std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; })) continue;
    auto& branch = proj.branches[make_occupation(std::move(environment))];
    if (branch.size() == 0) branch = CVector::Zero(static_cast<Eigen::Index>(pow2(n)));
    branch(static_cast<Eigen::Index>(index)) += amp;
    proj.selected_norm += std::norm(amp);
  }
  return proj;
}

}  // namespace

double coincidence_probability(const PhotonicState& state, std::span<const std::string> pattern) {
  const double total = state.squared_norm();
  if (total == 0.0) throw NumericalError("zero state");
  return project_one_per_mode(state, pattern).selected_norm / total;
}

PostSelection coincidence_postselect(const PhotonicState& state,
                                     std::span<const std::string> pattern) {
  const double total = state.squared_norm();
  if (total == 0.0) throw NumericalError("zero state");
  Projection proj = project_one_per_mode(state, pattern);

  PostSelection out;
  if (proj.branches.empty() || proj.selected_norm == 0.0) {
    out.status = PostSelection::Status::zero_probability;
    return out;
  }
  out.probability = proj.selected_norm / total;
  if (proj.selected_norm < std::numeric_limits<double>::min() ||
      !std::isfinite(1.0 / std::sqrt(proj.selected_norm))) {
    out.status = PostSelection::Status::underflow;
    return out;
  }

  const Eigen::Index dim = proj.branches.begin()->second.size();
  CMatrix rho = CMatrix::Zero(dim, dim);
  for (const auto& [env, v] : proj.branches) rho += v * v.adjoint();
  rho /= proj.selected_norm;
  out.density = rho;

  if (proj.branches.size() == 1) {
    out.conditional = proj.branches.begin()->second / std::sqrt(proj.selected_norm);
    out.status = PostSelection::Status::ok;
    return out;
  }
  const double purity = (rho * rho).trace().real();
  if (purity < 1.0 - 1e-12) {
    out.status = PostSelection::Status::mixed;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  CVector v = es.eigenvectors().col(dim - 1);
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  v *= std::conj(v(k)) / std::abs(v(k));
  out.conditional = v;
  out.status = PostSelection::Status::ok;
  return out;
}

PairKind parse_pair_kind(const std::string& text) {
  if (text == "singlet" || text == "psi-") return PairKind::singlet;
  if (text == "triplet" || text == "psi+") return PairKind::triplet;
  if (text == "phi+") return PairKind::phi_plus;
  if (text == "phi-") return PairKind::phi_minus;
  if (text == "hv" || text == "product") return PairKind::product_hv;
  throw std::invalid_argument("unknown pair state '" + text + "'");
}

std::string to_string(PairKind kind) {
  switch (kind) {
    case PairKind::singlet: return "psi-";
    case PairKind::triplet: return "psi+";
    case PairKind::phi_plus: return "phi+";
    case PairKind::phi_minus: return "phi-";
    case PairKind::product_hv: return "hv";
  }
  return "?";
}

SourceConfig SourceConfig::two_singlets() {
  return SourceConfig{{{"1", "2", PairKind::singlet}, {"3", "4", PairKind::singlet}}};
}

void SourceConfig::validate() const {
  if (pairs.empty()) throw std::invalid_argument("no photon sources declared");
  std::set<std::string> modes;
  for (const auto& p : pairs) {
    for (const auto& m : {p.mode_a, p.mode_b}) {
      if (m.empty()) throw std::invalid_argument("empty mode-id in source");
      if (!modes.insert(m).second) {
        throw std::invalid_argument("mode '" + m + "' declared by more than one source");
      }
    }
  }
}

PhotonicState SourceConfig::state() const {
  validate();
  const double h = 1.0 / std::numbers::sqrt2;
  PhotonicState out = PhotonicState::vacuum();
  for (const auto& p : pairs) {
    const ModeLabel aH{p.mode_a, Polarization::H}, aV{p.mode_a, Polarization::V};
    const ModeLabel bH{p.mode_b, Polarization::H}, bV{p.mode_b, Polarization::V};
    std::vector<std::pair<std::vector<ModeLabel>, Complex>> terms;
    switch (p.kind) {
      case PairKind::singlet: terms = {{{aH, bV}, h}, {{aV, bH}, -h}}; break;
      case PairKind::triplet: terms = {{{aH, bV}, h}, {{aV, bH}, h}}; break;
      case PairKind::phi_plus: terms = {{{aH, bH}, h}, {{aV, bV}, h}}; break;
      case PairKind::phi_minus: terms = {{{aH, bH}, h}, {{aV, bV}, -h}}; break;
      case PairKind::product_hv: terms = {{{aH, bV}, 1.0}}; break;
    }
    out = out * PhotonicState::from_creation_terms(terms);
  }
  return out;
}

PostSelection simulate_postselected_state(const SourceConfig& sources, const TdcSetting& setting,
                                          const std::pair<std::string, std::string>& interfering,
                                          std::span<const std::string> pattern) {
  const PhotonicState input = sources.state();
  const int photons = input.photon_number();
  if (photons != 4) {
    throw std::invalid_argument("photon-number mismatch: sources emit " + std::to_string(photons) +
                                " photons, expected 4");
  }
  if (pattern.size() != 4) throw std::invalid_argument("fourfold pattern needs 4 modes");
  if (!input.has_mode(interfering.first) || !input.has_mode(interfering.second)) {
    throw std::invalid_argument("interfering modes must be source outputs");
  }
  const PhotonicState out = apply_tdc(input, interfering.first, interfering.second, setting);
  return coincidence_postselect(out, pattern);
}

double internal_overlap(double delay, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("dip width sigma must be positive");
  return std::exp(-delay * delay / (2.0 * sigma * sigma));
}

PhotonicState partially_delayed_photon(const std::string& spatial, Polarization pol,
                                       double overlap) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw std::invalid_argument("overlap must lie in [0, 1]");
  const double rest = std::sqrt(std::max(0.0, 1.0 - overlap * overlap));
  return PhotonicState::from_creation_terms(
      {{{ModeLabel{spatial, pol, 0}}, overlap}, {{ModeLabel{spatial, pol, 1}}, rest}});
}

double fock_hom_coincidence(double eta, double overlap, const TdcSetting& convention) {
  TdcSetting setting = convention;
  setting.reflectivity = eta;
  const PhotonicState input = partially_delayed_photon("a", Polarization::H, overlap) *
                              PhotonicState::single_photon({"b", Polarization::H, 0});
  const std::string pattern[] = {"a", "b"};
  return coincidence_probability(apply_tdc(input, "a", "b", setting), pattern);
}

double fock_hom_visibility(double eta, const TdcSetting& convention) {
  const double distinguishable = fock_hom_coincidence(eta, 0.0, convention);
  const double indistinguishable = fock_hom_coincidence(eta, 1.0, convention);
  return 1.0 - indistinguishable / distinguishable;
}

void HomDipModel::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("dip width sigma must be positive");
  if (!(v_sys >= 0.0 && v_sys <= 1.0)) throw std::invalid_argument("V_sys must lie in [0, 1]");
  if (!(baseline >= 0.0)) throw std::invalid_argument("baseline must be non-negative");
}

std::vector<DipPoint> hom_dip_curve(double eta, std::span<const double> delays,
                                    const HomDipModel& model) {
  model.validate();
  const double depth = model.v_sys * ideal_hom_visibility(eta);
  std::vector<DipPoint> out;
  out.reserve(delays.size());
  for (double tau : delays) {
    const double s = internal_overlap(tau, model.sigma);
    out.push_back({tau, model.baseline * (1.0 - depth * s * s)});
  }
  return out;
}

double fit_vsys(std::span<const VisibilityPoint> points) {
  if (points.empty()) throw std::invalid_argument("fit_vsys needs at least one point");
  double num = 0.0;
  double den = 0.0;
  for (const auto& p : points) {
    if (!(p.eta > 0.0 && p.eta < 1.0)) throw std::invalid_argument("fit points need eta in (0, 1)");
    const double v = ideal_hom_visibility(p.eta);
    num += p.visibility * v;
    den += v * v;
  }
  if (den < std::numeric_limits<double>::min()) {
    throw NumericalError("degenerate V_sys fit: all ideal visibilities vanish");
  }
  return num / den;
}

}  // namespace pqs
