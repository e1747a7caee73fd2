#include "twa/fock.hpp"

#include <cmath>
#include <string>

#include "twa/linalg.hpp"

namespace twa {

namespace {

void require_square(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    fail(ErrorKind::InvalidDimension, "FockOperator: matrix must be square and non-empty");
}

void require_same_dim(const FockOperator& a, const FockOperator& b) {
  if (a.dim() != b.dim())
    fail(ErrorKind::InvalidDimension, "FockOperator: dimension mismatch (" +
                                          std::to_string(a.dim()) + " vs " +
                                          std::to_string(b.dim()) + ")");
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

double factorial(int n) { return std::round(std::exp(std::lgamma(n + 1.0))); }

}  // namespace

FockOperator::FockOperator(Matrix entries) : m_(std::move(entries)) { require_square(m_); }

FockOperator FockOperator::zero(int dim) {
  if (dim < 1) fail(ErrorKind::InvalidDimension, "dim must be positive");
  return FockOperator(Matrix::Zero(dim, dim));
}

FockOperator FockOperator::identity(int dim) {
  if (dim < 1) fail(ErrorKind::InvalidDimension, "dim must be positive");
  return FockOperator(Matrix::Identity(dim, dim));
}

FockOperator FockOperator::unit(int dim, int row, int col) {
  if (row < 0 || col < 0 || row >= dim || col >= dim)
    fail(ErrorKind::InvalidDimension, "unit operator index outside the basis");
  Matrix m = Matrix::Zero(dim, dim);
  m(row, col) = 1.0;
  return FockOperator(std::move(m));
}

bool FockOperator::is_hermitian(double tol) const {
  return linalg::hermiticity_defect(m_) <= tol;
}

FockOperator FockOperator::block(int levels) const {
  if (levels < 1 || levels > dim())
    fail(ErrorKind::InvalidDimension, "block size outside the basis");
  return FockOperator(m_.topLeftCorner(levels, levels));
}

FockOperator FockOperator::embedded(int new_dim) const {
  if (new_dim < dim()) fail(ErrorKind::InvalidDimension, "embedding into a smaller basis");
  Matrix m = Matrix::Zero(new_dim, new_dim);
  m.topLeftCorner(dim(), dim()) = m_;
  return FockOperator(std::move(m));
}

FockOperator& FockOperator::operator+=(const FockOperator& o) {
  require_same_dim(*this, o);
  m_ += o.m_;
  return *this;
}

FockOperator& FockOperator::operator-=(const FockOperator& o) {
  require_same_dim(*this, o);
  m_ -= o.m_;
  return *this;
}

FockOperator& FockOperator::operator*=(Complex s) {
  m_ *= s;
  return *this;
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  require_same_dim(a, b);
  return FockOperator(a.m_ * b.m_);
}

StateVector::StateVector(Vector amplitudes) : v_(std::move(amplitudes)) {
  if (v_.size() == 0) fail(ErrorKind::InvalidDimension, "StateVector: empty");
}

StateVector StateVector::normalized() const {
  const double n = v_.norm();
  if (n == 0.0) fail(ErrorKind::InvalidArgument, "cannot normalize the zero vector");
  return StateVector(v_ / n);
}

FockOperator StateVector::projector() const { return FockOperator(v_ * v_.adjoint()); }

double StateVector::top_level_population() const {
  const double total = v_.squaredNorm();
  return total == 0.0 ? 0.0 : std::norm(v_(v_.size() - 1)) / total;
}

int StateVector::max_occupied_level(double threshold) const {
  for (int k = dim() - 1; k >= 0; --k)
    if (std::norm(v_(k)) > threshold) return k;
  return -1;
}

void MonomialParams::validate() const {
  if (m < 0 || n < 0) fail(ErrorKind::InvalidArgument, "monomial indices must be non-negative");
  if (n < m) fail(ErrorKind::InvalidArgument, "monomial indices require n >= m");
  if (m + n < 1) fail(ErrorKind::InvalidArgument, "monomial degree must be at least 1");
  if (!std::isfinite(coupling)) fail(ErrorKind::InvalidArgument, "coupling must be finite");
}

Ladder ladder(int dim) {
  if (dim < 2) fail(ErrorKind::InvalidDimension, "ladder: dim must be at least 2");
  Matrix a = Matrix::Zero(dim, dim);
  for (int j = 0; j + 1 < dim; ++j) a(j, j + 1) = std::sqrt(static_cast<double>(j + 1));
  Matrix ad = a.adjoint();
  return {FockOperator(std::move(a)), FockOperator(std::move(ad))};
}

std::vector<ReorderTerm> normal_reorder_coeffs(int k, int l) {
  if (k < 0 || l < 0) fail(ErrorKind::InvalidArgument, "normal_reorder_coeffs: negative power");
  std::vector<ReorderTerm> terms;
  for (int p = 0; p <= std::min(k, l); ++p)
    terms.push_back({p, factorial(p) * binomial(k, p) * binomial(l, p)});
  return terms;
}

FockOperator normal_monomial(int creations, int annihilations, int dim) {
  if (dim < 1) fail(ErrorKind::InvalidDimension, "dim must be positive");
  if (creations < 0 || annihilations < 0)
    fail(ErrorKind::InvalidArgument, "normal_monomial: negative power");
  // <i| a^dag^c a^k |j> is nonzero only for i - c = j - k = s >= 0, and equals
  // sqrt(j!/s!) * sqrt(i!/s!).
  Matrix m = Matrix::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    const int i = s + creations, j = s + annihilations;
    if (i >= dim || j >= dim) continue;
    m(i, j) = std::exp(0.5 * (std::lgamma(i + 1.0) + std::lgamma(j + 1.0)) - std::lgamma(s + 1.0));
  }
  return FockOperator(std::move(m));
}

FockOperator antinormal_monomial(int annihilations, int creations, int dim) {
  FockOperator out = FockOperator::zero(dim);
  for (const auto& term : normal_reorder_coeffs(annihilations, creations))
    out += term.coefficient * normal_monomial(creations - term.p, annihilations - term.p, dim);
  return out;
}

namespace {

// sym(a^dag^c a^k) = sum_j j! C(c,j) C(k,j) 2^-j a^dag^(c-j) a^(k-j)
FockOperator symmetrized_monomial(int creations, int annihilations, int dim) {
  FockOperator out = FockOperator::zero(dim);
  for (int j = 0; j <= std::min(creations, annihilations); ++j) {
    const double c = factorial(j) * binomial(creations, j) * binomial(annihilations, j) * std::ldexp(1.0, -j);
    out += c * normal_monomial(creations - j, annihilations - j, dim);
  }
  return out;
}

void require_fits(const MonomialParams& params, int dim) {
  params.validate();
  if (params.n >= dim)
    fail(ErrorKind::InvalidDimension, "monomial power n=" + std::to_string(params.n) +
                                          " does not fit in dim=" + std::to_string(dim));
}

}  // namespace

FockOperator symmetrized_hamiltonian(const MonomialParams& params, int dim) {
  require_fits(params, dim);
  FockOperator h = symmetrized_monomial(params.m, params.n, dim) +
                   symmetrized_monomial(params.n, params.m, dim);
  return params.coupling * h;
}

FockOperator effective_hamiltonian(const MonomialParams& params, int dim) {
  require_fits(params, dim);
  const int m = params.m, n = params.n;
  FockOperator h = normal_monomial(m, n, dim) + normal_monomial(n, m, dim) +
                   antinormal_monomial(n, m, dim) + antinormal_monomial(m, n, dim);
  const double prefactor = (n + m) * std::ldexp(1.0, -(n + m));
  return (prefactor * params.coupling) * h;
}

FockOperator displacement(Complex alpha, int dim, WarningLog* log) {
  const auto [a, ad] = ladder(dim);
  const Matrix generator = kI * (alpha * ad.matrix() - std::conj(alpha) * a.matrix());
  const auto eig = linalg::jacobi_eigen(generator);

  Vector phases(dim);
  for (int k = 0; k < dim; ++k) phases(k) = std::exp(-kI * eig.eigenvalues[static_cast<std::size_t>(k)]);
  Matrix d = eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();

  const double tail = std::norm(d(dim - 1, 0));
  if (tail > kTruncationThreshold)
    warn(log, "tail", "displacement: coherent tail " + std::to_string(tail) +
                          " at level " + std::to_string(dim - 1));
  return FockOperator(std::move(d));
}

FockOperator parity(int dim) {
  if (dim < 1) fail(ErrorKind::InvalidDimension, "dim must be positive");
  Matrix p = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return FockOperator(std::move(p));
}

StateVector coherent_state(Complex alpha, int dim) {
  if (dim < 1) fail(ErrorKind::InvalidDimension, "dim must be positive");
  Vector v(dim);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int k = 1; k < dim; ++k) v(k) = v(k - 1) * alpha / std::sqrt(static_cast<double>(k));
  StateVector state(std::move(v));
  const double tail = state.top_level_population();
  if (tail > kTruncationThreshold)
    fail(ErrorKind::Truncation, "coherent state |alpha|=" + std::to_string(std::abs(alpha)) +
                                    " puts " + std::to_string(tail) + " on level " +
                                    std::to_string(dim - 1) + "; increase dim");
  return state.normalized();
}

StateVector state_prep(const StateKind& kind, int dim) {
  if (dim < 1) fail(ErrorKind::InvalidDimension, "dim must be positive");
  return std::visit(
      [dim](const auto& k) -> StateVector {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, FockKind>) {
          if (k.n < 0 || k.n >= dim)
            fail(ErrorKind::InvalidDimension, "Fock level " + std::to_string(k.n) +
                                                  " outside dim=" + std::to_string(dim));
          Vector v = Vector::Zero(dim);
          v(k.n) = 1.0;
          return StateVector(std::move(v));
        } else if constexpr (std::is_same_v<K, CoherentKind>) {
          return coherent_state(k.alpha, dim);
        } else {
          if (dim < 2) fail(ErrorKind::InvalidDimension, "low-excited state needs dim >= 2");
          Vector v = Vector::Zero(dim);
          v(0) = 1.0;
          v(1) = k.alpha;
          return StateVector(std::move(v)).normalized();
        }
      },
      kind);
}

void check_truncation(const FockOperator& rho, const char* what) {
  const int top = rho.dim() - 1;
  const double total = std::abs(rho.trace());
  const double pop = std::abs(rho(top, top));
  if (total > 0.0 && pop / total > kTruncationThreshold)
    fail(ErrorKind::Truncation, std::string(what) + ": population " + std::to_string(pop / total) +
                                    " at top level " + std::to_string(top));
}

}  // namespace twa
