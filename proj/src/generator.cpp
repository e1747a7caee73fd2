#include "twa/generator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "twa/classical.hpp"
#include "twa/linalg.hpp"
#include "twa/parallel.hpp"

namespace twa {

Vector vec(const FockOperator& r) {
  return Eigen::Map<const Vector>(r.matrix().data(), r.matrix().size());
}

FockOperator unvec(const Vector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim)
    fail(ErrorKind::InvalidDimension, "unvec: length is not dim^2");
  return FockOperator(Eigen::Map<const Matrix>(v.data(), dim, dim));
}

FockOperator SuperOperator::apply(const FockOperator& r) const {
  if (r.dim() != dim) fail(ErrorKind::InvalidDimension, "SuperOperator::apply: dimension mismatch");
  return unvec(matrix * vec(r), dim);
}

SuperOperator SuperOperator::from_map(int dim, const std::function<FockOperator(const FockOperator&)>& map) {
  const int n = dim * dim;
  SuperOperator s{dim, Matrix::Zero(n, n)};
  for (int col = 0; col < dim; ++col)
    for (int row = 0; row < dim; ++row)
      s.matrix.col(row + col * dim) = vec(map(FockOperator::unit(dim, row, col)));
  return s;
}

FockOperator channel_apply(const LindbladChannel& ch, const FockOperator& r) {
  if (ch.op.dim() != r.dim()) fail(ErrorKind::InvalidDimension, "channel_apply: shape mismatch");
  const Matrix& l = ch.op.matrix();
  const Matrix ld = l.adjoint();
  const Matrix ldl = ld * l;
  const Matrix& m = r.matrix();
  Matrix out = 2.0 * (l * m * ld) - ldl * m - m * ldl;
  return FockOperator(ch.weight * out);
}

LPair build_L_jk(int p, int q, int j, int k, int dim) {
  if (p < 0 || q < 0 || j < 0 || k < 0 || j > p || k > q)
    fail(ErrorKind::InvalidArgument, "build_L_jk: need 0 <= j <= p and 0 <= k <= q (got p=" +
                                         std::to_string(p) + " q=" + std::to_string(q) + " j=" +
                                         std::to_string(j) + " k=" + std::to_string(k) + ")");
  if (std::max(p, q) >= dim) fail(ErrorKind::InvalidDimension, "build_L_jk: ladder powers exceed dim");
  // a^dag^x a^y - i a^(P-x) a^dag^(Q-y)
  auto make = [dim](int x, int y, int big_p, int big_q) {
    return normal_monomial(x, y, dim) - kI * antinormal_monomial(big_p - x, big_q - y, dim);
  };
  FockOperator l = make(j, k, p, q);
  FockOperator lt = make(k, j, q, p).adjoint();
  return {std::move(l), std::move(lt)};
}

namespace {

LindbladChannel channel(double weight, FockOperator op, std::string label) {
  return {weight, std::move(op), std::move(label)};
}

FTerm term(Complex c, FockOperator left, FockOperator right) {
  return {c, std::move(left), std::move(right)};
}

}  // namespace

GeneratorSpec harmonic_generator(int dim, double coupling) {
  GeneratorSpec spec;
  spec.name = "harmonic";
  spec.h_eff = effective_hamiltonian({1, 1, coupling}, dim);
  spec.f_form = std::vector<FTerm>{};
  return spec;
}

GeneratorSpec kerr_generator(int dim, double coupling) {
  if (dim < 6) fail(ErrorKind::InvalidDimension, "kerr_generator: dim must be at least 6");
  GeneratorSpec spec;
  spec.name = "kerr";
  spec.h_eff = effective_hamiltonian({2, 2, coupling}, dim);

  const double w = 0.25 * coupling;
  auto l10 = build_L_jk(2, 2, 1, 0, dim);
  auto l12 = build_L_jk(2, 2, 1, 2, dim);
  spec.channels.push_back(channel(+w, l10.L, "L_10^22"));
  spec.channels.push_back(channel(+w, l12.L_tilde, "L~_12^22"));
  spec.channels.push_back(channel(-w, l12.L, "L_12^22"));
  spec.channels.push_back(channel(-w, l10.L_tilde, "L~_10^22"));

  // F(R) = a R a^dag^2 a + a^dag R a^2 a^dag
  const auto [a, ad] = ladder(dim);
  spec.f_form = std::vector<FTerm>{
      term(coupling, a, normal_monomial(2, 1, dim)),
      term(coupling, ad, antinormal_monomial(2, 1, dim)),
  };
  return spec;
}

GeneratorSpec shg_generator(int dim, double coupling) {
  if (dim < 5) fail(ErrorKind::InvalidDimension, "shg_generator: dim must be at least 5");
  GeneratorSpec spec;
  spec.name = "shg";
  spec.h_eff = effective_hamiltonian({1, 2, coupling}, dim);

  const auto [a, ad] = ladder(dim);
  const double w1 = coupling / 16.0, w2 = coupling / 8.0;
  auto l01 = build_L_jk(2, 1, 0, 1, dim);
  auto l20 = build_L_jk(2, 1, 2, 0, dim);
  auto l10 = build_L_jk(2, 1, 1, 0, dim);
  auto l11 = build_L_jk(2, 1, 1, 1, dim);
  // L~_02^21 has no in-range (L_kj^qp)^dag form; its operator is i(a^dag - i a^dag^2).
  FockOperator lt02 = kI * (ad - kI * normal_monomial(2, 0, dim));

  spec.channels.push_back(channel(+w1, l01.L, "L_01^21"));
  spec.channels.push_back(channel(+w1, lt02, "L~_02^21"));
  spec.channels.push_back(channel(-w1, l20.L, "L_20^21"));
  spec.channels.push_back(channel(-w1, l01.L_tilde, "L~_01^21"));
  spec.channels.push_back(channel(+w2, l10.L, "L_10^21"));
  spec.channels.push_back(channel(+w2, l11.L_tilde, "L~_11^21"));
  spec.channels.push_back(channel(-w2, l11.L, "L_11^21"));
  spec.channels.push_back(channel(-w2, l10.L_tilde, "L~_10^21"));

  const auto id = FockOperator::identity(dim);
  const double c = coupling / 8.0;
  const auto ad2a = normal_monomial(2, 1, dim);
  const auto a2ad = antinormal_monomial(2, 1, dim);
  spec.f_form = std::vector<FTerm>{
      term(2.0 * c, a, normal_monomial(2, 0, dim)),
      term(2.0 * c, ad, normal_monomial(0, 2, dim)),
      term(4.0 * c, a, normal_monomial(1, 1, dim)),
      term(4.0 * c, ad, antinormal_monomial(1, 1, dim)),
      term(c, ad2a, id),
      term(c, id, ad2a),
      term(c, a2ad, id),
      term(c, id, a2ad),
  };
  return spec;
}

GeneratorSpec generator_for(const MonomialParams& params, int dim) {
  params.validate();
  if (params.m == 1 && params.n == 1) return harmonic_generator(dim, params.coupling);
  if (params.m == 2 && params.n == 2) return kerr_generator(dim, params.coupling);
  if (params.m == 1 && params.n == 2) return shg_generator(dim, params.coupling);
  fail(ErrorKind::InvalidArgument, "no explicit generator for (m,n)=(" + std::to_string(params.m) + "," +
                                       std::to_string(params.n) + "); use the phase-space oracle");
}

namespace {

// Precomputed pieces of the rhs: i[R,H] + sum_j 2 w_j L_j R L_j^dag - {B, R},
// B = sum_j w_j L_j^dag L_j.
class CompiledRhs {
 public:
  explicit CompiledRhs(const GeneratorSpec& spec) : spec_(spec) {
    if (spec.oracle) return;
    const int d = spec.dim();
    drift_ = Matrix::Zero(d, d);
    for (const auto& ch : spec.channels) {
      if (ch.op.dim() != d) fail(ErrorKind::InvalidDimension, "generator: channel dimension mismatch");
      ops_.push_back(ch.op.matrix());
      adj_.push_back(ch.op.matrix().adjoint());
      weights_.push_back(ch.weight);
      drift_ += ch.weight * (adj_.back() * ops_.back());
    }
    use_f_form_ = spec.channels.empty() && spec.f_form && !spec.f_form->empty();
  }

  Matrix operator()(const Matrix& r) const {
    if (spec_.oracle) {
      return unvec(spec_.oracle->matrix * Eigen::Map<const Vector>(r.data(), r.size()), spec_.dim()).matrix();
    }
    const Matrix& h = spec_.h_eff.matrix();
    Matrix out = kI * (r * h - h * r);
    if (use_f_form_) {
      out += f_form_dissipator(*spec_.f_form, FockOperator(r)).matrix();
      return out;
    }
    for (std::size_t j = 0; j < ops_.size(); ++j) out.noalias() += (2.0 * weights_[j]) * (ops_[j] * r * adj_[j]);
    if (!ops_.empty()) out -= drift_ * r + r * drift_;
    return out;
  }

 private:
  const GeneratorSpec& spec_;
  std::vector<Matrix> ops_, adj_;
  std::vector<double> weights_;
  Matrix drift_;
  bool use_f_form_ = false;
};

}  // namespace

FockOperator dissipator(const GeneratorSpec& spec, const FockOperator& r) {
  FockOperator out = FockOperator::zero(r.dim());
  for (const auto& ch : spec.channels) out += channel_apply(ch, r);
  return out;
}

FockOperator f_form_dissipator(const std::vector<FTerm>& terms, const FockOperator& r) {
  const Matrix& m = r.matrix();
  const Matrix md = m.adjoint();
  Matrix f = Matrix::Zero(m.rows(), m.cols());
  Matrix f_of_adjoint = Matrix::Zero(m.rows(), m.cols());
  for (const auto& t : terms) {
    f += t.coefficient * (t.left.matrix() * m * t.right.matrix());
    f_of_adjoint += t.coefficient * (t.left.matrix() * md * t.right.matrix());
  }
  return FockOperator(kI * (f - f_of_adjoint.adjoint()));
}

FockOperator rhs(const GeneratorSpec& spec, const FockOperator& r) {
  if (r.dim() != spec.dim()) fail(ErrorKind::InvalidDimension, "rhs: operator dimension does not match the spec");
  return FockOperator(CompiledRhs(spec)(r.matrix()));
}

SuperOperator assembled_superoperator(const GeneratorSpec& spec, int levels) {
  if (levels < 1 || levels > spec.dim()) fail(ErrorKind::InvalidDimension, "assembled_superoperator: bad level count");
  const CompiledRhs g(spec);
  const int d = spec.dim();
  SuperOperator s{levels, Matrix::Zero(levels * levels, levels * levels)};
  for (int col = 0; col < levels; ++col)
    for (int row = 0; row < levels; ++row) {
      Matrix e = Matrix::Zero(d, d);
      e(row, col) = 1.0;
      const Matrix image = g(e).topLeftCorner(levels, levels);
      s.matrix.col(row + col * levels) = Eigen::Map<const Vector>(image.data(), image.size());
    }
  return s;
}

namespace {

// Row vector picking Tr(E_ab w(beta)) = w(beta)(b, a) for column a + b*levels.
Vector input_row(Complex beta, int levels) {
  const FockOperator w = weyl_kernel(beta, levels);
  const Matrix wt = w.matrix().transpose();
  return Eigen::Map<const Vector>(wt.data(), wt.size());
}

Vector output_col(Complex alpha, int levels) { return vec(weyl_kernel(alpha, levels)); }

// sum over nodes of weight * out(node) * combine(node)^T, chunked for a
// thread-count independent summation order.
Matrix node_outer_sum(const PhaseGrid& grid, int levels, const std::function<Vector(std::size_t)>& in_row) {
  const std::size_t n = grid.size();
  const std::size_t chunks = std::min(kReductionChunks, n);
  const int l2 = levels * levels;
  std::vector<Matrix> partial(chunks, Matrix::Zero(l2, l2));
  parallel_for(chunks, [&](std::size_t c) {
    for (std::size_t i = c * n / chunks; i < (c + 1) * n / chunks; ++i)
      partial[c].noalias() += output_col(grid.node(i), levels) * in_row(i).transpose();
  });
  Matrix total = Matrix::Zero(l2, l2);
  for (const auto& p : partial) total += p;
  return total * grid.weight();
}

}  // namespace

SuperOperator twa_transfer(const MonomialParams& params, int levels, const PhaseGrid& grid, double t) {
  params.validate();
  if (levels < 1) fail(ErrorKind::InvalidDimension, "twa_transfer: levels must be positive");
  const auto pre = preimages(grid, params, t);
  return {levels, node_outer_sum(grid, levels, [&](std::size_t i) { return input_row(pre[i], levels); })};
}

SuperOperator oracle_generator(const MonomialParams& params, int levels, const PhaseGrid& grid, double dt_probe,
                               WarningLog* log) {
  params.validate();
  if (!(dt_probe > 0.0)) fail(ErrorKind::InvalidArgument, "oracle_generator: dt_probe must be positive");
  if (levels < 1) fail(ErrorKind::InvalidDimension, "oracle_generator: levels must be positive");

  const auto plus = preimages(grid, params, dt_probe);
  const auto minus = preimages(grid, params, -dt_probe);
  const double inv = 1.0 / (2.0 * dt_probe);
  Matrix g = node_outer_sum(grid, levels, [&](std::size_t i) {
    return Vector((input_row(plus[i], levels) - input_row(minus[i], levels)) * inv);
  });

  if (log != nullptr) {
    const auto plus2 = preimages(grid, params, 2.0 * dt_probe);
    const auto minus2 = preimages(grid, params, -2.0 * dt_probe);
    const Matrix g2 = node_outer_sum(grid, levels, [&](std::size_t i) {
      return Vector((input_row(plus2[i], levels) - input_row(minus2[i], levels)) * (0.5 * inv));
    });
    // g2 - g = 3 c dt^2 + O(dt^4) where c dt^2 is the remainder of g.
    const double remainder = linalg::operator_norm(g2 - g) / 3.0;
    const double scale = std::max(1.0, linalg::operator_norm(g));
    if (remainder > 1e-3 * scale)
      warn(log, "conditioning", "oracle_generator: central-difference remainder " + std::to_string(remainder) +
                                    " vs generator norm " + std::to_string(scale));
  }
  return {levels, std::move(g)};
}

GeneratorSpec oracle_spec(const MonomialParams& params, int dim, const PhaseGrid& grid, double dt_probe,
                          WarningLog* log) {
  GeneratorSpec spec;
  spec.name = "oracle";
  spec.h_eff = effective_hamiltonian(params, dim);
  spec.oracle = oracle_generator(params, dim, grid, dt_probe, log);
  return spec;
}

double spectral_radius_estimate(const GeneratorSpec& spec) {
  const CompiledRhs g(spec);
  const int d = spec.dim();
  // Deterministic Hermitian start with weight on every entry.
  Matrix r(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r(i, j) = Complex(1.0 / (1.0 + i + j), i == j ? 0.0 : 0.1 * (i - j));
  r /= r.norm();
  double estimate = 0.0;
  for (int it = 0; it < 60; ++it) {
    Matrix next = g(r);
    const double n = next.norm();
    if (n == 0.0) return estimate;
    estimate = std::max(estimate, n);
    r = next / n;
  }
  return estimate;
}

double default_rk4_step(const GeneratorSpec& spec) {
  const double rho = spectral_radius_estimate(spec);
  return rho > 0.0 ? std::min(1e-3, 0.5 / rho) : 1e-3;
}

namespace {

Matrix rk4_step(const CompiledRhs& g, const Matrix& r, double h) {
  const Matrix k1 = g(r);
  const Matrix k2 = g(r + (0.5 * h) * k1);
  const Matrix k3 = g(r + (0.5 * h) * k2);
  const Matrix k4 = g(r + h * k3);
  return r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_trace(const Matrix& r, Complex trace0, double t) {
  const double drift = std::abs(r.trace() - trace0);
  if (!(drift <= 1e-8 * std::max(1.0, std::abs(trace0))) || !r.allFinite())
    fail(ErrorKind::StepSize, "evolve_R: trace drifted by " + std::to_string(drift) + " at t=" + std::to_string(t) +
                                  "; reduce the step");
}

}  // namespace

Evolution evolve_R(const GeneratorSpec& spec, const FockOperator& r0, const std::vector<double>& sample_times,
                   double max_step) {
  if (r0.dim() != spec.dim()) fail(ErrorKind::InvalidDimension, "evolve_R: R0 dimension does not match the spec");
  if (!std::is_sorted(sample_times.begin(), sample_times.end()) ||
      (!sample_times.empty() && sample_times.front() < 0.0))
    fail(ErrorKind::InvalidArgument, "evolve_R: sample times must be non-negative and sorted");
  if (max_step <= 0.0) max_step = default_rk4_step(spec);

  const CompiledRhs g(spec);
  const Complex trace0 = r0.trace();
  Evolution out;
  Matrix r = r0.matrix();
  double t = 0.0;
  for (double target : sample_times) {
    const double span = target - t;
    if (span > 0.0) {
      const int steps = static_cast<int>(std::ceil(span / max_step - 1e-12));
      const double h = span / steps;
      for (int s = 0; s < steps; ++s) r = rk4_step(g, r, h);
      t = target;
      check_trace(r, trace0, t);
    }
    out.times.push_back(target);
    out.states.emplace_back(r);
  }
  return out;
}

FockOperator evolve_R(const GeneratorSpec& spec, const FockOperator& r0, double t, int steps) {
  if (r0.dim() != spec.dim()) fail(ErrorKind::InvalidDimension, "evolve_R: R0 dimension does not match the spec");
  if (steps < 1) fail(ErrorKind::InvalidArgument, "evolve_R: steps must be positive");
  const CompiledRhs g(spec);
  Matrix r = r0.matrix();
  const double h = t / steps;
  for (int s = 0; s < steps; ++s) r = rk4_step(g, r, h);
  check_trace(r, r0.trace(), t);
  return FockOperator(std::move(r));
}

FockOperator short_time_R(const GeneratorSpec& spec, const FockOperator& r0, double t) {
  return r0 + t * rhs(spec, r0);
}

KrausSet kraus_operators(const GeneratorSpec& spec, double dt, KrausConvention convention) {
  if (dt < 0.0) fail(ErrorKind::InvalidArgument, "kraus_operators: dt must be non-negative");
  if (spec.oracle) fail(ErrorKind::InvalidArgument, "kraus_operators: needs an explicit channel list");
  const int d = spec.dim();
  Matrix k0 = Matrix::Identity(d, d) - (kI * dt) * spec.h_eff.matrix();
  KrausSet set;
  for (const auto& ch : spec.channels) {
    const double w = std::abs(ch.weight);
    const double scale = convention == KrausConvention::DriftCompleted ? std::sqrt(2.0 * w * dt) : w * std::sqrt(dt);
    set.terms.push_back({ch.weight >= 0.0 ? 1 : -1, scale * ch.op});
    if (convention == KrausConvention::DriftCompleted)
      k0 -= (dt * ch.weight) * (ch.op.matrix().adjoint() * ch.op.matrix());
  }
  set.k0 = FockOperator(std::move(k0));
  return set;
}

FockOperator kraus_apply(const KrausSet& set, const FockOperator& r) {
  const Matrix& m = r.matrix();
  Matrix out = set.k0.matrix() * m * set.k0.matrix().adjoint();
  for (const auto& k : set.terms) out += static_cast<double>(k.sign) * (k.op.matrix() * m * k.op.matrix().adjoint());
  return FockOperator(std::move(out));
}

FockOperator kraus_step(const GeneratorSpec& spec, const FockOperator& r, double dt, KrausConvention convention) {
  return kraus_apply(kraus_operators(spec, dt, convention), r);
}

FockOperator kraus_completeness_defect(const KrausSet& set) {
  const int d = set.k0.dim();
  Matrix out = set.k0.matrix() * set.k0.matrix().adjoint() - Matrix::Identity(d, d);
  for (const auto& k : set.terms) out += static_cast<double>(k.sign) * (k.op.matrix() * k.op.matrix().adjoint());
  return FockOperator(std::move(out));
}

}  // namespace twa
