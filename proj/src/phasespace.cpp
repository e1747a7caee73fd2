#include "twa/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "twa/parallel.hpp"

namespace twa {

PhaseGrid::PhaseGrid(double r_max, int points_per_axis) : r_max_(r_max), points_(points_per_axis) {
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    fail(ErrorKind::InvalidArgument, "PhaseGrid: r_max must be positive");
  if (points_per_axis < 1) fail(ErrorKind::InvalidArgument, "PhaseGrid: need at least one point per axis");
}

PhaseGrid PhaseGrid::for_center(Complex alpha0) {
  const double r = std::abs(alpha0) + 4.0;
  return PhaseGrid(r, static_cast<int>(std::ceil(2.0 * r / 0.1 - 1e-9)));
}

double PhaseGrid::weight() const {
  const double h = spacing();
  return h * h / std::numbers::pi;
}

Complex PhaseGrid::node(std::size_t index) const {
  const int j = static_cast<int>(index / static_cast<std::size_t>(points_));
  const int k = static_cast<int>(index % static_cast<std::size_t>(points_));
  return {coordinate(j), coordinate(k)};
}

bool PhaseGrid::on_boundary(std::size_t index) const {
  const int j = static_cast<int>(index / static_cast<std::size_t>(points_));
  const int k = static_cast<int>(index % static_cast<std::size_t>(points_));
  return j == 0 || k == 0 || j == points_ - 1 || k == points_ - 1;
}

namespace {

// Fills w with the size x size block of 2 D(2 alpha) P.
void fill_kernel(Complex alpha, int size, Matrix& w) {
  w.resize(size, size);
  const Complex beta = 2.0 * alpha;
  const double x = std::norm(beta);

  if (x == 0.0) {
    w.setZero();
    for (int k = 0; k < size; ++k) w(k, k) = (k % 2 == 0) ? 2.0 : -2.0;
    return;
  }

  const double log_r = 0.5 * std::log(x);
  const double theta = std::arg(beta);

  thread_local std::vector<double> log_fact;
  if (static_cast<int>(log_fact.size()) < size + 1) {
    log_fact.resize(static_cast<std::size_t>(size) + 1);
    for (std::size_t k = 0; k < log_fact.size(); ++k) log_fact[k] = std::lgamma(static_cast<double>(k) + 1.0);
  }

  for (int d = 0; d < size; ++d) {
    const Complex phase = std::polar(1.0, d * theta);
    double l_prev = 0.0, l_cur = 1.0;  // L_{n-1}^{(d)}, L_n^{(d)}
    for (int n = 0; n + d < size; ++n) {
      if (n == 1) {
        l_prev = 1.0;
        l_cur = 1.0 + d - x;
      } else if (n > 1) {
        const double l_next = ((2.0 * (n - 1) + 1.0 + d - x) * l_cur - (n - 1.0 + d) * l_prev) / n;
        l_prev = l_cur;
        l_cur = l_next;
      }
      const int m = n + d;
      const double log_pref = d * log_r - 0.5 * x +
                              0.5 * (log_fact[static_cast<std::size_t>(n)] - log_fact[static_cast<std::size_t>(m)]);
      const Complex value = (n % 2 == 0 ? 2.0 : -2.0) * std::exp(log_pref) * l_cur * phase;
      w(m, n) = value;
      if (d != 0) w(n, m) = std::conj(value);
    }
  }
}

// Smallest leading block that contains every nonzero entry of f.
int support_size(const Matrix& f) {
  for (int k = static_cast<int>(f.rows()) - 1; k >= 0; --k)
    if (f.row(k).cwiseAbs().maxCoeff() > 0.0 || f.col(k).cwiseAbs().maxCoeff() > 0.0) return k + 1;
  return 0;
}

}  // namespace

FockOperator weyl_kernel(Complex alpha, int dim) {
  if (dim < 1) fail(ErrorKind::InvalidDimension, "weyl_kernel: dim must be positive");
  Matrix w;
  fill_kernel(alpha, dim, w);
  return FockOperator(std::move(w));
}

double symbol_at(const FockOperator& f, Complex alpha) {
  const int size = support_size(f.matrix());
  if (size == 0) return 0.0;
  thread_local Matrix w;
  fill_kernel(alpha, size, w);
  const auto fb = f.matrix().topLeftCorner(size, size);
  return fb.cwiseProduct(w.transpose()).sum().real();
}

KernelCache::KernelCache(const PhaseGrid& grid, int dim, std::size_t budget_bytes)
    : grid_(grid), dim_(dim) {
  if (dim < 1) fail(ErrorKind::InvalidDimension, "KernelCache: dim must be positive");
  const std::size_t bytes = grid.size() * static_cast<std::size_t>(dim) * dim * sizeof(Complex);
  if (bytes > budget_bytes) return;
  kernels_.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { fill_kernel(grid_.node(i), dim_, kernels_[i]); });
}

const Matrix& KernelCache::kernel(std::size_t index, Matrix& scratch) const {
  if (stored()) return kernels_[index];
  fill_kernel(grid_.node(index), dim_, scratch);
  return scratch;
}

WignerField symbol(const FockOperator& f, const PhaseGrid& grid, const KernelCache* cache) {
  if (cache != nullptr && (!(cache->grid() == grid) || cache->dim() != f.dim()))
    fail(ErrorKind::InvalidArgument, "symbol: kernel cache does not match grid/dim");

  WignerField field{grid, std::vector<double>(grid.size())};
  std::vector<double> residue(grid.size());
  const int size = std::max(1, support_size(f.matrix()));
  const Matrix fb = f.matrix().topLeftCorner(size, size);

  parallel_for(grid.size(), [&](std::size_t i) {
    Complex value;
    if (cache != nullptr) {
      thread_local Matrix scratch;
      const Matrix& w = cache->kernel(i, scratch);
      value = fb.cwiseProduct(w.topLeftCorner(size, size).transpose()).sum();
    } else {
      thread_local Matrix w;
      fill_kernel(grid.node(i), size, w);
      value = fb.cwiseProduct(w.transpose()).sum();
    }
    field.values[i] = value.real();
    residue[i] = std::abs(value.imag());
  });

  const double worst = *std::max_element(residue.begin(), residue.end());
  if (worst > 1e-10)
    fail(ErrorKind::NonHermitian, "symbol: imaginary residue " + std::to_string(worst) +
                                      " (operator is not Hermitian)");
  return field;
}

double boundary_ratio(const WignerField& field) {
  double edge = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const double v = std::abs(field.values[i]);
    peak = std::max(peak, v);
    if (field.grid.on_boundary(i)) edge = std::max(edge, v);
  }
  return peak == 0.0 ? 0.0 : edge / peak;
}

FockOperator inverse_map(const WignerField& field, int dim, const KernelCache* cache, WarningLog* log) {
  if (field.values.size() != field.grid.size())
    fail(ErrorKind::InvalidArgument, "inverse_map: field size does not match its grid");
  if (cache != nullptr && (!(cache->grid() == field.grid) || cache->dim() != dim))
    fail(ErrorKind::InvalidArgument, "inverse_map: kernel cache does not match grid/dim");
  if (dim < 1) fail(ErrorKind::InvalidDimension, "inverse_map: dim must be positive");

  const double ratio = boundary_ratio(field);
  if (ratio > 1e-8)
    warn(log, "boundary", "inverse_map: field reaches " + std::to_string(ratio) +
                              " of its maximum on the grid boundary");

  const std::size_t n = field.grid.size();
  const std::size_t chunks = std::min(kReductionChunks, n);
  std::vector<Matrix> partial(chunks, Matrix::Zero(dim, dim));

  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * n / chunks, end = (c + 1) * n / chunks;
    Matrix scratch;
    Matrix& acc = partial[c];
    for (std::size_t i = begin; i < end; ++i) {
      const double v = field.values[i];
      if (v == 0.0) continue;
      if (cache != nullptr) {
        acc += v * cache->kernel(i, scratch);
      } else {
        fill_kernel(field.grid.node(i), dim, scratch);
        acc += v * scratch;
      }
    }
  });

  Matrix total = Matrix::Zero(dim, dim);
  for (const auto& p : partial) total += p;
  total *= field.grid.weight();
  // Hermitian by construction; remove rounding asymmetry.
  total = 0.5 * (total + total.adjoint()).eval();
  return FockOperator(std::move(total));
}

namespace {

template <class F>
double node_sum(const WignerField& field, F term) {
  const std::size_t n = field.values.size();
  const std::size_t chunks = std::min<std::size_t>(kReductionChunks, std::max<std::size_t>(n, 1));
  std::vector<double> partial(chunks, 0.0);
  for (std::size_t c = 0; c < chunks; ++c)
    for (std::size_t i = c * n / chunks; i < (c + 1) * n / chunks; ++i) partial[c] += term(i);
  double total = 0.0;
  for (double p : partial) total += p;
  return total * field.grid.weight();
}

}  // namespace

double integrate(const WignerField& field) {
  return node_sum(field, [&](std::size_t i) { return field.values[i]; });
}

double purity(const WignerField& field) {
  return node_sum(field, [&](std::size_t i) { return field.values[i] * field.values[i]; });
}

double overlap(const WignerField& a, const WignerField& b) {
  if (!(a.grid == b.grid) || a.values.size() != b.values.size())
    fail(ErrorKind::InvalidArgument, "overlap: fields live on different grids");
  return node_sum(a, [&](std::size_t i) { return a.values[i] * b.values[i]; });
}

double hamiltonian_symbol(const MonomialParams& params, Complex alpha) {
  const Complex ac = std::conj(alpha);
  const Complex term = std::pow(ac, params.m) * std::pow(alpha, params.n);
  // The second monomial is the conjugate of the first.
  return params.coupling * 2.0 * term.real();
}

void write_field_csv(const WignerField& field, std::ostream& out) {
  out << "re_alpha,im_alpha,w\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const Complex z = field.grid.node(i);
    out << z.real() << ',' << z.imag() << ',' << field.values[i] << '\n';
  }
}

WignerField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("re_alpha,im_alpha,w", 0) != 0)
    fail(ErrorKind::Io, "field CSV: missing header 're_alpha,im_alpha,w'");

  std::vector<double> re, im, w;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    double x = 0, y = 0, v = 0;
    char c1 = 0, c2 = 0;
    if (!(row >> x >> c1 >> y >> c2 >> v) || c1 != ',' || c2 != ',')
      fail(ErrorKind::Io, "field CSV: malformed row '" + line + "'");
    re.push_back(x);
    im.push_back(y);
    w.push_back(v);
  }

  const auto m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(w.size()))));
  if (m < 2 || static_cast<std::size_t>(m) * m != w.size())
    fail(ErrorKind::Io, "field CSV: row count is not a square grid of side >= 2");

  const double r_max = -re.front() / (1.0 - 1.0 / m);
  PhaseGrid grid(r_max, m);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Complex z = grid.node(i);
    if (std::abs(z.real() - re[i]) > 1e-9 * r_max || std::abs(z.imag() - im[i]) > 1e-9 * r_max)
      fail(ErrorKind::Io, "field CSV: node " + std::to_string(i) + " is off the uniform grid");
  }
  return {grid, std::move(w)};
}

}  // namespace twa
