#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "twa/linalg.hpp"

using namespace twa;

TEST_SUITE("linalg") {
  TEST_CASE("jacobi on a diagonal matrix") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 3;
    m(1, 1) = 1;
    m(2, 2) = 2;
    const auto r = linalg::jacobi_eigen(m);
    CHECK(r.eigenvalues == std::vector<double>{3, 2, 1});
  }

  TEST_CASE("jacobi against Eigen's self-adjoint solver") {
    for (unsigned seed = 1; seed <= 6; ++seed) {
      const int dim = 4 + 5 * static_cast<int>(seed);
      const Matrix m = oracle::hermitian_sample(dim, dim, seed);
      const auto r = linalg::jacobi_eigen(m);
      Eigen::SelfAdjointEigenSolver<Matrix> ref(m);
      for (int k = 0; k < dim; ++k) CHECK(r.eigenvalues[k] == doctest::Approx(ref.eigenvalues()(dim - 1 - k)).epsilon(1e-10));
      const Matrix& v = r.eigenvectors;
      CHECK((v.adjoint() * v - Matrix::Identity(dim, dim)).norm() < 1e-12);
      double sum = 0.0;
      for (double l : r.eigenvalues) sum += l;
      CHECK(std::abs(sum - m.trace().real()) < 1e-10);
      CHECK(r.off_diagonal <= 1e-12 * std::max(1.0, m.norm()));
    }
  }

  TEST_CASE("degenerate spectrum") {
    Matrix m = Matrix::Identity(6, 6);
    m(0, 1) = m(1, 0) = 1e-3;
    const auto r = linalg::jacobi_eigen(m);
    CHECK(r.eigenvalues.front() == doctest::Approx(1.001));
    CHECK(r.eigenvalues.back() == doctest::Approx(0.999));
  }

  TEST_CASE("sweep limit reports non-convergence") {
    const Matrix m = oracle::hermitian_sample(20, 20, 3);
    CHECK_THROWS_AS(linalg::jacobi_eigen(m, 1e-12, 1), Error);
  }

  TEST_CASE("operator norm and hermiticity defect") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 2.0;
    CHECK(linalg::operator_norm(m) == doctest::Approx(2.0));
    CHECK(linalg::hermiticity_defect(m) == doctest::Approx(2.0));
  }
}
