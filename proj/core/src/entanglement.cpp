#include "pqs/entanglement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pqs/errors.hpp"

namespace pqs {

namespace {

int qubit_count(Eigen::Index dim) {
  const auto d = static_cast<std::size_t>(dim);
  if (d < 2 || !std::has_single_bit(d)) throw std::invalid_argument("dimension is not a power of two");
  return std::countr_zero(d);
}

// Maps (kept index, traced index) -> full index, for sorted `keep`.
struct Split {
  int n;
  std::vector<int> keep;
  std::vector<int> rest;

  std::size_t join(std::size_t a, std::size_t e) const {
    std::size_t full = 0;
    const int nk = static_cast<int>(keep.size());
    const int nr = static_cast<int>(rest.size());
    for (int k = 0; k < nk; ++k) {
      if (a & site_bit(nk, k)) full |= site_bit(n, keep[static_cast<std::size_t>(k)]);
    }
    for (int k = 0; k < nr; ++k) {
      if (e & site_bit(nr, k)) full |= site_bit(n, rest[static_cast<std::size_t>(k)]);
    }
    return full;
  }
};

Split make_split(int n, std::span<const int> keep) {
  if (keep.empty()) throw std::invalid_argument("partial trace needs a nonempty keep set");
  Split s{n, {keep.begin(), keep.end()}, {}};
  std::sort(s.keep.begin(), s.keep.end());
  if (std::adjacent_find(s.keep.begin(), s.keep.end()) != s.keep.end()) {
    throw std::invalid_argument("repeated qubit index in keep set");
  }
  if (s.keep.front() < 0 || s.keep.back() >= n) {
    throw std::invalid_argument("qubit index out of range in keep set");
  }
  for (int q = 0; q < n; ++q) {
    if (!std::binary_search(s.keep.begin(), s.keep.end(), q)) s.rest.push_back(q);
  }
  return s;
}

CMatrix hermitian_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  const RVector w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

DensityMatrix::DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols()) throw std::invalid_argument("density matrix must be square");
  n_ = qubit_count(rho_.rows());
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  // Exact symmetrization removes the residual rounding asymmetry.
  rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
  const Complex tr = rho_.trace();
  if (std::abs(tr - 1.0) > 1e-12) {
    throw std::invalid_argument("density matrix trace " + std::to_string(tr.real()) + " != 1");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("density matrix is not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::from_pure(const CVector& psi) {
  const double norm2 = psi.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-10) throw std::invalid_argument("pure state is not normalized");
  return DensityMatrix(psi * psi.adjoint() / norm2);
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const Split s = make_split(rho.n_qubits(), keep);
  const auto dk = static_cast<Eigen::Index>(pow2(static_cast<int>(s.keep.size())));
  const std::size_t de = pow2(static_cast<int>(s.rest.size()));
  CMatrix out = CMatrix::Zero(dk, dk);
  const CMatrix& m = rho.matrix();
  for (Eigen::Index a = 0; a < dk; ++a) {
    for (Eigen::Index b = 0; b < dk; ++b) {
      Complex acc{};
      for (std::size_t e = 0; e < de; ++e) {
        acc += m(static_cast<Eigen::Index>(s.join(static_cast<std::size_t>(a), e)),
                 static_cast<Eigen::Index>(s.join(static_cast<std::size_t>(b), e)));
      }
      out(a, b) = acc;
    }
  }
  out /= out.trace().real();
  return DensityMatrix(std::move(out));
}

DensityMatrix partial_trace(const CVector& psi, std::span<const int> keep) {
  const double norm2 = psi.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-10) throw std::invalid_argument("pure state is not normalized");
  const Split s = make_split(qubit_count(psi.size()), keep);
  const auto dk = static_cast<Eigen::Index>(pow2(static_cast<int>(s.keep.size())));
  const auto de = static_cast<Eigen::Index>(pow2(static_cast<int>(s.rest.size())));
  // Reshape to a dk x de matrix M, then rho = M M^dag.
  CMatrix m(dk, de);
  for (Eigen::Index a = 0; a < dk; ++a) {
    for (Eigen::Index e = 0; e < de; ++e) {
      m(a, e) = psi(static_cast<Eigen::Index>(
          s.join(static_cast<std::size_t>(a), static_cast<std::size_t>(e))));
    }
  }
  CMatrix out = m * m.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  out /= out.trace().real();
  return DensityMatrix(std::move(out));
}

double concurrence_margin(const DensityMatrix& rho) {
  if (rho.n_qubits() != 2) throw std::invalid_argument("concurrence needs a two-qubit state");
  // sqrt(lambda_i) of rho Sigma rho^T Sigma are the singular values of
  // R Sigma conj(R) with R = sqrt(rho); this avoids a non-Hermitian eigensolve.
  const CMatrix r = hermitian_sqrt(rho.matrix());
  const CMatrix sigma = kron(pauli_y(), pauli_y());
  const CMatrix m = r * sigma * r.conjugate();
  Eigen::JacobiSVD<CMatrix> svd(m);
  const RVector sv = svd.singularValues();  // non-increasing
  return sv(0) - sv(1) - sv(2) - sv(3);
}

double concurrence(const DensityMatrix& rho) { return std::max(0.0, concurrence_margin(rho)); }

std::size_t ConcurrenceProfile::pair_index(QubitPair pair) const {
  if (pair.first > pair.second) std::swap(pair.first, pair.second);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (pairs[k] == pair) return k;
  }
  throw std::invalid_argument("pair (" + std::to_string(pair.first + 1) + "," +
                              std::to_string(pair.second + 1) + ") not in profile");
}

ConcurrenceProfile pairwise_profile(const std::function<CVector(double)>& family,
                                    std::span<const QubitPair> pairs,
                                    std::span<const double> theta_grid) {
  ConcurrenceProfile p;
  p.theta.assign(theta_grid.begin(), theta_grid.end());
  for (auto pr : pairs) {
    if (pr.first > pr.second) std::swap(pr.first, pr.second);
    p.pairs.push_back(pr);
  }
  p.values.assign(p.pairs.size(), std::vector<double>(p.theta.size()));
  p.margins.assign(p.pairs.size(), std::vector<double>(p.theta.size()));
  for (std::size_t t = 0; t < p.theta.size(); ++t) {
    const CVector psi = family(p.theta[t]);
    for (std::size_t k = 0; k < p.pairs.size(); ++k) {
      const int keep[2] = {p.pairs[k].first, p.pairs[k].second};
      const double margin = concurrence_margin(partial_trace(psi, keep));
      p.margins[k][t] = margin;
      p.values[k][t] = std::max(0.0, margin);
    }
  }
  return p;
}

MonogamyResult monogamy_check(const CVector& psi, int focus, double tol) {
  const int n = qubit_count(psi.size());
  if (focus < 0 || focus >= n) throw std::invalid_argument("focus qubit out of range");
  MonogamyResult r;
  const int one[1] = {focus};
  const CMatrix rf = partial_trace(psi, one).matrix();
  r.tangle = std::max(0.0, 4.0 * rf.determinant().real());
  for (int j = 0; j < n; ++j) {
    if (j == focus) continue;
    const int keep[2] = {std::min(focus, j), std::max(focus, j)};
    const double c = concurrence(partial_trace(psi, keep));
    r.sum_c2 += c * c;
  }
  r.satisfied = r.sum_c2 <= r.tangle + tol;
  return r;
}

MonogamyResult monogamy_check(const DensityMatrix& rho, int focus, double tol) {
  if (rho.purity() < 1.0 - 1e-9) {
    throw std::invalid_argument("monogamy check requires a pure state");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  const CVector psi = es.eigenvectors().col(rho.dim() - 1);
  return monogamy_check(CVector(psi / psi.norm()), focus, tol);
}

std::vector<ZeroCrossing> zero_crossings(std::span<const double> theta,
                                         std::span<const double> margin) {
  if (theta.size() != margin.size()) throw std::invalid_argument("grid and values differ in length");
  for (std::size_t i = 1; i < theta.size(); ++i) {
    const double step = theta[i] - theta[i - 1];
    if (step <= 0.0) throw std::invalid_argument("theta grid must be increasing");
    if (step > 0.01 + 1e-12) throw std::invalid_argument("theta grid coarser than 0.01 rad");
  }
  constexpr double kZero = 1e-12;
  auto sign = [&](std::size_t i) { return margin[i] > kZero ? 1 : (margin[i] < -kZero ? -1 : 0); };

  std::vector<ZeroCrossing> out;
  const std::size_t n = theta.size();
  std::size_t i = 0;
  while (i < n) {
    if (sign(i) != 0) {
      if (i + 1 < n && sign(i + 1) != 0 && sign(i + 1) != sign(i)) {
        const double t = theta[i] + (theta[i + 1] - theta[i]) * margin[i] / (margin[i] - margin[i + 1]);
        out.push_back({sign(i + 1) > 0 ? ZeroCrossing::Kind::birth : ZeroCrossing::Kind::death, t, t});
      }
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && sign(j + 1) == 0) ++j;
    const int before = i > 0 ? sign(i - 1) : 0;
    const int after = j + 1 < n ? sign(j + 1) : 0;
    if (j > i) {
      out.push_back({ZeroCrossing::Kind::plateau, theta[i], theta[j]});
    } else if (before != 0 && after != 0 && before != after) {
      out.push_back({after > 0 ? ZeroCrossing::Kind::birth : ZeroCrossing::Kind::death, theta[i], theta[i]});
    }
    i = j + 1;
  }
  return out;
}

std::vector<ZeroCrossing> zero_crossings(const ConcurrenceProfile& profile, QubitPair pair) {
  return zero_crossings(profile.theta, profile.margins[profile.pair_index(pair)]);
}

double state_fidelity(const DensityMatrix& rho, const CVector& psi) {
  if (psi.size() != rho.dim()) throw std::invalid_argument("dimension mismatch");
  return psi.dot(rho.matrix() * psi).real();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace pqs
