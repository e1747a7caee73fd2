#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

#include "twa/fock.hpp"

namespace twa {

/// Uniform midpoint grid on [-r_max, r_max]^2 in (Re alpha, Im alpha).
/// Node (j, k) sits at (-r_max + (j+1/2)h) + i(-r_max + (k+1/2)h) and is
/// stored at index j*M + k. Each node carries the weight h^2/pi of d^2alpha/pi.
class PhaseGrid {
 public:
  PhaseGrid(double r_max, int points_per_axis);

  /// r_max = |alpha0| + 4 and the smallest M with h <= 0.1.
  static PhaseGrid for_center(Complex alpha0);

  double r_max() const { return r_max_; }
  int points_per_axis() const { return points_; }
  double spacing() const { return 2.0 * r_max_ / points_; }
  double weight() const;
  std::size_t size() const { return static_cast<std::size_t>(points_) * points_; }
  Complex node(std::size_t index) const;
  double coordinate(int j) const { return -r_max_ + (j + 0.5) * spacing(); }
  bool on_boundary(std::size_t index) const;

  friend bool operator==(const PhaseGrid&, const PhaseGrid&) = default;

 private:
  double r_max_;
  int points_;
};

struct WignerField {
  PhaseGrid grid;
  std::vector<double> values;
};

/// w(alpha) = 2 D(alpha) (-1)^{a^dag a} D^dag(alpha) = 2 D(2 alpha) (-1)^{a^dag a},
/// evaluated from the closed-form matrix elements
///   <m|D(b)|n> = sqrt(n!/m!) b^{m-n} e^{-|b|^2/2} L_n^{(m-n)}(|b|^2),  m >= n.
/// Entries are those of the untruncated kernel, so they stay accurate far
/// outside the region where a truncated-basis D(alpha) is usable.
FockOperator weyl_kernel(Complex alpha, int dim);

/// Tr(f w(alpha)) at a single point; f is assumed Hermitian.
double symbol_at(const FockOperator& f, Complex alpha);

/// Precomputed kernels for every node of a grid. When the estimated size
/// exceeds `budget_bytes` nothing is stored and kernels are rebuilt on demand.
class KernelCache {
 public:
  static constexpr std::size_t kDefaultBudget = std::size_t{1} << 30;

  KernelCache(const PhaseGrid& grid, int dim, std::size_t budget_bytes = kDefaultBudget);

  const PhaseGrid& grid() const { return grid_; }
  int dim() const { return dim_; }
  bool stored() const { return !kernels_.empty(); }

  // Returns the cached kernel, or builds it into `scratch` and returns that.
  const Matrix& kernel(std::size_t index, Matrix& scratch) const;

 private:
  PhaseGrid grid_;
  int dim_;
  std::vector<Matrix> kernels_;
};

/// W_f(alpha) = Tr(f w(alpha)) on every node. Throws NonHermitian if any
/// node has an imaginary part above 1e-10.
WignerField symbol(const FockOperator& f, const PhaseGrid& grid, const KernelCache* cache = nullptr);

/// f = sum_nodes (h^2/pi) w(alpha) W(alpha). Warns ("boundary") when the
/// field on the outermost ring exceeds 1e-8 of its maximum.
FockOperator inverse_map(const WignerField& field, int dim, const KernelCache* cache = nullptr,
                         WarningLog* log = nullptr);

double integrate(const WignerField& field);
double purity(const WignerField& field);
// sum (h^2/pi) W_a W_b; the grids must match.
double overlap(const WignerField& a, const WignerField& b);

/// Largest |W| on the outermost ring of nodes relative to max |W|.
double boundary_ratio(const WignerField& field);

/// coupling * (alpha*^m alpha^n + alpha^m alpha*^n)
double hamiltonian_symbol(const MonomialParams& params, Complex alpha);

/// CSV with header `re_alpha,im_alpha,w`, rows in node order.
void write_field_csv(const WignerField& field, std::ostream& out);
WignerField read_field_csv(std::istream& in);

}  // namespace twa
