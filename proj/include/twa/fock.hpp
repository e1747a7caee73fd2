#pragma once

#include <variant>
#include <vector>

#include "twa/common.hpp"

namespace twa {

/// Dense operator on the Fock levels 0..dim-1 (hbar = 1).
class FockOperator {
 public:
  FockOperator() = default;
  explicit FockOperator(Matrix entries);

  static FockOperator zero(int dim);
  static FockOperator identity(int dim);
  // |row><col|
  static FockOperator unit(int dim, int row, int col);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }

  Complex trace() const { return m_.trace(); }
  FockOperator adjoint() const { return FockOperator(m_.adjoint()); }
  double frobenius_norm() const { return m_.norm(); }
  bool is_hermitian(double tol = 1e-12) const;
  // Leading dim x dim block (levels below `levels`).
  FockOperator block(int levels) const;
  // Zero-padded copy in a larger basis.
  FockOperator embedded(int dim) const;

  FockOperator& operator+=(const FockOperator& o);
  FockOperator& operator-=(const FockOperator& o);
  FockOperator& operator*=(Complex s);

  friend FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
  friend FockOperator operator-(FockOperator a, const FockOperator& b) { return a -= b; }
  friend FockOperator operator*(const FockOperator& a, const FockOperator& b);
  friend FockOperator operator*(Complex s, FockOperator a) { return a *= s; }
  friend FockOperator operator*(FockOperator a, Complex s) { return a *= s; }

 private:
  Matrix m_;
};

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(Vector amplitudes);

  int dim() const { return static_cast<int>(v_.size()); }
  const Vector& amplitudes() const { return v_; }
  Complex operator[](int k) const { return v_(k); }
  double norm() const { return v_.norm(); }
  StateVector normalized() const;
  FockOperator projector() const;
  Complex inner(const StateVector& other) const { return v_.dot(other.v_); }
  // |amplitude at level dim-1|^2 / total
  double top_level_population() const;
  // Highest level with |amplitude|^2 above `threshold`.
  int max_occupied_level(double threshold = 1e-14) const;

 private:
  Vector v_;
};

/// Monomial Hamiltonian indices: H_mn = {a^dag^m a^n + a^dag^n a^m}_sym.
struct MonomialParams {
  int m = 1;
  int n = 1;
  double coupling = 1.0;

  void validate() const;
  int degree() const { return m + n; }
};

struct Ladder {
  FockOperator a;
  FockOperator a_dagger;
};

Ladder ladder(int dim);

struct ReorderTerm {
  int p;
  double coefficient;
};

/// a^k a^dag^l = sum_p c_p a^dag^(l-p) a^(k-p),
/// c_p = k! l! / (p! (k-p)! (l-p)!).
std::vector<ReorderTerm> normal_reorder_coeffs(int k, int l);

/// a^dag^creations a^annihilations, exact on the truncated basis
/// (normal-ordered products never leave it and come back).
FockOperator normal_monomial(int creations, int annihilations, int dim);

/// a^k a^dag^l rewritten in normal order, so it is free of the ladder
/// truncation artifact.
FockOperator antinormal_monomial(int annihilations, int creations, int dim);

FockOperator symmetrized_hamiltonian(const MonomialParams& params, int dim);
FockOperator effective_hamiltonian(const MonomialParams& params, int dim);

/// D(alpha) = exp(alpha a^dag - alpha* a) through the eigendecomposition of
/// the Hermitian generator i(alpha a^dag - alpha* a). Warns ("tail") when the
/// displaced vacuum puts more than 1e-8 on the top level.
FockOperator displacement(Complex alpha, int dim, WarningLog* log = nullptr);

FockOperator parity(int dim);

struct FockKind {
  int n = 0;
};
struct CoherentKind {
  Complex alpha;
};
// (|0> + alpha|1>) / sqrt(1 + |alpha|^2)
struct LowExcitedKind {
  Complex alpha;
};
using StateKind = std::variant<FockKind, CoherentKind, LowExcitedKind>;

/// Poisson amplitudes e^{-|a|^2/2} a^n / sqrt(n!), renormalized on the
/// truncated basis. Throws Truncation when the top level holds more than
/// 1e-8 of the population.
StateVector coherent_state(Complex alpha, int dim);

StateVector state_prep(const StateKind& kind, int dim);

inline constexpr double kTruncationThreshold = 1e-8;

// Throws Truncation if the top level of rho carries more than the threshold.
void check_truncation(const FockOperator& rho, const char* what);

}  // namespace twa
