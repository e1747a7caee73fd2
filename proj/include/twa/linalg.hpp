#pragma once

#include <vector>

#include "twa/common.hpp"

namespace twa::linalg {

struct JacobiResult {
  std::vector<double> eigenvalues;  // descending
  Matrix eigenvectors;              // column k belongs to eigenvalues[k]
  int sweeps = 0;
  double off_diagonal = 0.0;        // Frobenius norm of the final off-diagonal part
};

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Sweeps over every (p, q) pair applying the unitary rotation that zeroes
/// A(p, q). Terminates once the off-diagonal Frobenius norm drops below
/// `tolerance * max(1, ||A||_F)`; throws NonConvergence after `max_sweeps`.
/// The input is assumed Hermitian (only its lower triangle is trusted).
JacobiResult jacobi_eigen(const Matrix& hermitian, double tolerance = 1e-12,
                          int max_sweeps = 100);

// Largest singular value.
double operator_norm(const Matrix& m);

// Max |A - A^dagger| entry.
double hermiticity_defect(const Matrix& m);

}  // namespace twa::linalg
