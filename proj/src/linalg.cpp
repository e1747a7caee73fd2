#include "twa/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/SVD>

namespace twa::linalg {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  const Eigen::Index n = a.rows();
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r)
      if (r != c) sum += std::norm(a(r, c));
  return std::sqrt(sum);
}

// Zeroes a(p, q) with the unitary G = diag(1, e^{-i phi}) * R(theta).
void rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double g = std::abs(apq);
  const Complex phase = std::conj(apq) / g;  // e^{-i phi}

  const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * g);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const Complex gpp = c, gpq = s, gqp = -s * phase, gqq = c * phase;
  const Eigen::Index n = a.rows();

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex x = a(k, p), y = a(k, q);
    a(k, p) = x * gpp + y * gqp;
    a(k, q) = x * gpq + y * gqq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex x = a(p, k), y = a(q, k);
    a(p, k) = std::conj(gpp) * x + std::conj(gqp) * y;
    a(q, k) = std::conj(gpq) * x + std::conj(gqq) * y;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex x = v(k, p), y = v(k, q);
    v(k, p) = x * gpp + y * gqp;
    v(k, q) = x * gpq + y * gqq;
  }
}

}  // namespace

JacobiResult jacobi_eigen(const Matrix& hermitian, double tolerance, int max_sweeps) {
  if (hermitian.rows() != hermitian.cols() || hermitian.rows() == 0)
    fail(ErrorKind::InvalidDimension, "jacobi_eigen: matrix must be square and non-empty");

  const Eigen::Index n = hermitian.rows();
  Matrix a = 0.5 * (hermitian + hermitian.adjoint());
  Matrix v = Matrix::Identity(n, n);
  const double scale = std::max(1.0, a.norm());
  const double target = tolerance * scale;

  JacobiResult result;
  double off = off_diagonal_norm(a);
  int sweep = 0;
  while (off > target) {
    if (sweep == max_sweeps)
      fail(ErrorKind::NonConvergence,
           "jacobi_eigen: no convergence after " + std::to_string(max_sweeps) +
               " sweeps (off-diagonal norm " + std::to_string(off) + ")");
    ++sweep;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double g = std::abs(a(p, q));
        if (g == 0.0) continue;
        // Entries below rounding relative to both diagonals are dropped.
        if (sweep > 4 && std::abs(a(p, p)) + 1e2 * g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + 1e2 * g == std::abs(a(q, q))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        rotate(a, v, p, q);
      }
    }
    off = off_diagonal_norm(a);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return a(x, x).real() > a(y, y).real();
  });

  result.eigenvalues.reserve(order.size());
  result.eigenvectors.resize(n, n);
  for (std::size_t k = 0; k < order.size(); ++k) {
    result.eigenvalues.push_back(a(order[k], order[k]).real());
    result.eigenvectors.col(static_cast<Eigen::Index>(k)) = v.col(order[k]);
  }
  result.sweeps = sweep;
  result.off_diagonal = off;
  return result;
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double hermiticity_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace twa::linalg
