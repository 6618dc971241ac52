#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace pqs {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Qubit/site 0 is the most significant bit of a basis index, so a product
// state |q0 q1 ... q_{n-1}> sits at index sum_k q_k 2^(n-1-k). |0> = H = spin up.
inline constexpr std::size_t site_bit(int n_sites, int site) {
  return std::size_t{1} << (n_sites - 1 - site);
}

inline constexpr std::size_t pow2(int n) { return std::size_t{1} << n; }

CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(const CVector& a, const CVector& b);

/// Pauli matrices in the computational (H/V) basis.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

/// |<a|b>|^2 for normalized vectors.
double fidelity(const CVector& a, const CVector& b);

}  // namespace pqs
