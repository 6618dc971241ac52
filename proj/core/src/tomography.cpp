#include "pqs/tomography.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "pqs/errors.hpp"

namespace pqs {

namespace {

CMatrix local_rotation(PauliBasis b) {
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix u(2, 2);
  switch (b) {
    case PauliBasis::X:
      u << r, r, r, -r;
      break;
    case PauliBasis::Y:
      u << r, -kI * r, r, kI * r;
      break;
    case PauliBasis::Z:
      u << 1, 0, 0, 1;
      break;
  }
  return u;
}

char basis_char(PauliBasis b) { return "XYZ"[static_cast<int>(b)]; }

std::uint64_t poisson(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(rng);
}

}  // namespace

std::string MeasurementSetting::label() const {
  std::string s;
  for (auto b : bases) s += basis_char(b);
  return s;
}

MeasurementSetting MeasurementSetting::parse(const std::string& label) {
  MeasurementSetting m;
  for (char c : label) {
    switch (c) {
      case 'X': m.bases.push_back(PauliBasis::X); break;
      case 'Y': m.bases.push_back(PauliBasis::Y); break;
      case 'Z': m.bases.push_back(PauliBasis::Z); break;
      default: throw ConfigError("bad basis character '" + std::string(1, c) + "' in '" + label + "'");
    }
  }
  if (m.bases.empty()) throw ConfigError("empty basis string");
  return m;
}

CMatrix MeasurementSetting::rotation() const {
  CMatrix u = CMatrix::Identity(1, 1);
  for (auto b : bases) u = kron(u, local_rotation(b));
  return u;
}

std::vector<MeasurementSetting> build_settings(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("tomography needs at least one qubit");
  std::vector<MeasurementSetting> out;
  std::size_t total = 1;
  for (int k = 0; k < n_qubits; ++k) total *= 3;
  for (std::size_t idx = 0; idx < total; ++idx) {
    MeasurementSetting m;
    m.bases.resize(static_cast<std::size_t>(n_qubits));
    std::size_t rest = idx;
    for (int k = n_qubits - 1; k >= 0; --k) {
      m.bases[static_cast<std::size_t>(k)] = static_cast<PauliBasis>(rest % 3);
      rest /= 3;
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<double> born_probabilities(const DensityMatrix& rho, const MeasurementSetting& setting) {
  if (setting.n_qubits() != rho.n_qubits()) throw std::invalid_argument("setting and state sizes differ");
  const CMatrix u = setting.rotation();
  const CMatrix rotated = u * rho.matrix() * u.adjoint();
  std::vector<double> p(static_cast<std::size_t>(rotated.rows()));
  for (Eigen::Index k = 0; k < rotated.rows(); ++k) p[static_cast<std::size_t>(k)] = std::max(0.0, rotated(k, k).real());
  return p;
}

std::string outcome_string(std::size_t outcome, int n_qubits) {
  std::string s;
  for (int k = 0; k < n_qubits; ++k) s += (outcome & site_bit(n_qubits, k)) ? '1' : '0';
  return s;
}

void CountsTable::validate() const {
  if (n_qubits < 1) throw ConfigError("counts table has no qubits");
  if (settings.size() != counts.size()) throw ConfigError("counts and settings differ in length");
  for (std::size_t s = 0; s < settings.size(); ++s) {
    if (settings[s].n_qubits() != n_qubits) throw ConfigError("setting " + settings[s].label() + " has wrong size");
    if (counts[s].size() != pow2(n_qubits)) throw ConfigError("setting " + settings[s].label() + " has wrong outcome count");
  }
}

void CountsTable::write_csv(std::ostream& out) const {
  validate();
  out << "# seed=" << seed << " events=" << events << " qubits=" << n_qubits << "\n";
  out << "setting_id,basis_string,outcome_string,count\n";
  for (std::size_t s = 0; s < settings.size(); ++s) {
    const std::string label = settings[s].label();
    for (std::size_t o = 0; o < counts[s].size(); ++o) {
      out << s << "," << label << "," << outcome_string(o, n_qubits) << "," << counts[s][o] << "\n";
    }
  }
}

CountsTable CountsTable::read_csv(std::istream& in) {
  CountsTable t;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string tok;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "seed") t.seed = std::stoull(val);
        else if (key == "events") t.events = std::stoull(val);
        else if (key == "qubits") t.n_qubits = std::stoi(val);
      }
      continue;
    }
    if (!header) {
      header = true;
      if (line.rfind("setting_id", 0) == 0) continue;
    }
    std::istringstream ss(line);
    std::string id, basis, outcome, count;
    if (!std::getline(ss, id, ',') || !std::getline(ss, basis, ',') || !std::getline(ss, outcome, ',') ||
        !std::getline(ss, count)) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 4 comma-separated fields");
    }
    std::size_t sid = 0;
    std::uint64_t c = 0;
    try {
      sid = std::stoul(id);
      c = std::stoull(count);
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(lineno) + ": malformed number");
    }
    if (t.n_qubits == 0) t.n_qubits = static_cast<int>(basis.size());
    if (sid == t.settings.size()) {
      t.settings.push_back(MeasurementSetting::parse(basis));
      t.counts.emplace_back(pow2(t.n_qubits), 0);
    } else if (sid + 1 != t.settings.size() || t.settings[sid].label() != basis) {
      throw ConfigError("line " + std::to_string(lineno) + ": settings out of order");
    }
    if (static_cast<int>(outcome.size()) != t.n_qubits) {
      throw ConfigError("line " + std::to_string(lineno) + ": outcome length mismatch");
    }
    std::size_t o = 0;
    for (int k = 0; k < t.n_qubits; ++k) {
      const char ch = outcome[static_cast<std::size_t>(k)];
      if (ch != '0' && ch != '1') throw ConfigError("line " + std::to_string(lineno) + ": bad outcome");
      if (ch == '1') o |= site_bit(t.n_qubits, k);
    }
    t.counts[sid][o] = c;
  }
  t.validate();
  return t;
}

CountsTable simulate_counts(const DensityMatrix& rho, std::span<const MeasurementSetting> settings,
                            std::uint64_t events, std::uint64_t seed) {
  if (events < 1) throw std::invalid_argument("events per setting must be >= 1");
  CountsTable t;
  t.n_qubits = rho.n_qubits();
  t.seed = seed;
  t.events = events;
  t.settings.assign(settings.begin(), settings.end());
  std::mt19937_64 rng(seed);
  for (const auto& s : settings) {
    std::vector<std::uint64_t> row;
    for (double p : born_probabilities(rho, s)) row.push_back(poisson(rng, static_cast<double>(events) * p));
    t.counts.push_back(std::move(row));
  }
  return t;
}

DensityMatrix reconstruct_from_probabilities(std::span<const MeasurementSetting> settings,
                                             const std::vector<std::vector<double>>& probabilities) {
  if (settings.empty() || settings.size() != probabilities.size()) {
    throw std::invalid_argument("settings and probabilities differ in length");
  }
  const int n = settings.front().n_qubits();
  const std::size_t dim = pow2(n);
  const CMatrix paulis[4] = {CMatrix::Identity(2, 2), pauli_x(), pauli_y(), pauli_z()};

  std::size_t n_strings = 1;
  for (int k = 0; k < n; ++k) n_strings *= 4;

  CMatrix rho = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::vector<int> ops(static_cast<std::size_t>(n));
  for (std::size_t idx = 0; idx < n_strings; ++idx) {
    std::size_t rest = idx;
    for (int k = n - 1; k >= 0; --k) {
      ops[static_cast<std::size_t>(k)] = static_cast<int>(rest % 4);
      rest /= 4;
    }
    double sum = 0.0;
    int used = 0;
    for (std::size_t s = 0; s < settings.size(); ++s) {
      bool compatible = true;
      for (int k = 0; k < n && compatible; ++k) {
        const int op = ops[static_cast<std::size_t>(k)];
        compatible = op == 0 || static_cast<int>(settings[s].bases[static_cast<std::size_t>(k)]) == op - 1;
      }
      if (!compatible) continue;
      const auto& p = probabilities[s];
      if (p.size() != dim) throw std::invalid_argument("probability vector has wrong length");
      double e = 0.0;
      for (std::size_t o = 0; o < dim; ++o) {
        int parity = 0;
        for (int k = 0; k < n; ++k) {
          if (ops[static_cast<std::size_t>(k)] != 0 && (o & site_bit(n, k))) parity ^= 1;
        }
        e += parity ? -p[o] : p[o];
      }
      sum += e;
      ++used;
    }
    if (used == 0) throw ConfigError("measurement settings are not informationally complete");
    CMatrix op = CMatrix::Identity(1, 1);
    for (int k = 0; k < n; ++k) op = kron(op, paulis[ops[static_cast<std::size_t>(k)]]);
    rho += (sum / used) * op;
  }
  rho /= static_cast<double>(dim);
  rho = 0.5 * (rho + rho.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  RVector w = es.eigenvalues().cwiseMax(0.0);
  const double total = w.sum();
  if (!(total > 0.0)) throw NumericalError("reconstruction has no positive weight");
  w /= total;
  CMatrix out = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  out /= out.trace().real();
  return DensityMatrix(std::move(out));
}

DensityMatrix reconstruct(const CountsTable& counts) {
  counts.validate();
  std::vector<std::vector<double>> freq;
  for (std::size_t s = 0; s < counts.counts.size(); ++s) {
    double total = 0.0;
    for (auto c : counts.counts[s]) total += static_cast<double>(c);
    if (total <= 0.0) throw NumericalError("setting " + counts.settings[s].label() + " recorded no events");
    std::vector<double> f;
    for (auto c : counts.counts[s]) f.push_back(static_cast<double>(c) / total);
    freq.push_back(std::move(f));
  }
  return reconstruct_from_probabilities(counts.settings, freq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Uncertainty monte_carlo_uncertainty(const CountsTable& counts, int resamples,
                                    const std::function<double(const DensityMatrix&)>& functional,
                                    std::uint64_t seed) {
  if (resamples < 2) throw std::invalid_argument("need at least 2 resamples");
  counts.validate();
  Uncertainty u;
  u.samples.reserve(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    CountsTable t = counts;
    for (auto& row : t.counts) {
      for (auto& c : row) c = poisson(rng, static_cast<double>(c));
    }
    u.samples.push_back(functional(reconstruct(t)));
  }
  double mean = 0.0;
  for (double x : u.samples) mean += x;
  mean /= resamples;
  double var = 0.0;
  for (double x : u.samples) var += (x - mean) * (x - mean);
  u.mean = mean;
  u.std = std::sqrt(var / (resamples - 1));
  return u;
}

}  // namespace pqs
