#include "twa/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twa/linalg.hpp"
#include "twa/parallel.hpp"

namespace twa {

Spectrum hermitian_eigen(const FockOperator& r) {
  const Matrix& m = r.matrix();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (linalg::hermiticity_defect(m) > 1e-10 * scale)
    fail(ErrorKind::NonHermitian, "hermitian_eigen: input is not Hermitian (defect " +
                                      std::to_string(linalg::hermiticity_defect(m)) + ")");

  const auto jr = linalg::jacobi_eigen(m);
  Spectrum s;
  s.eigenvalues = jr.eigenvalues;
  const int d = r.dim();
  const double norm = std::max(1.0, m.norm());
  for (int k = 0; k < d; ++k) {
    const Vector v = jr.eigenvectors.col(k);
    s.residual = std::max(s.residual, (m * v - jr.eigenvalues[k] * v).norm());
    s.eigenvectors.emplace_back(v);
  }
  s.orthonormality_defect =
      (jr.eigenvectors.adjoint() * jr.eigenvectors - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (s.residual > 1e-9 * norm || s.orthonormality_defect > 1e-9)
    fail(ErrorKind::NonConvergence, "hermitian_eigen: residual " + std::to_string(s.residual) + ", Gram defect " +
                                        std::to_string(s.orthonormality_defect));
  return s;
}

std::vector<Spectrum> hermitian_eigen_all(const std::vector<FockOperator>& ops) {
  std::vector<Spectrum> out(ops.size());
  parallel_for(ops.size(), [&](std::size_t i) { out[i] = hermitian_eigen(ops[i]); });
  return out;
}

SumRules sum_rules(const Spectrum& spec) {
  SumRules s;
  for (double l : spec.eigenvalues) {
    s.s1 += l;
    s.s2 += l * l;
  }
  s.defect = s.s1 - s.s2;
  return s;
}

Negativity negativity(const Spectrum& spec) {
  Negativity n;
  if (spec.eigenvalues.empty()) return n;
  n.lambda_min = spec.eigenvalues.back();
  for (double l : spec.eigenvalues)
    if (l < 0.0) n.negative_sum += l;
  return n;
}

namespace {

// Truncated Poisson amplitudes (not renormalized, never throws); the
// trial family only needs some vector, orthogonality is imposed afterwards.
Vector raw_coherent(Complex beta, int dim) {
  Vector v(dim);
  v(0) = std::exp(-0.5 * std::norm(beta));
  for (int k = 1; k < dim; ++k) v(k) = v(k - 1) * beta / std::sqrt(static_cast<double>(k));
  return v;
}

}  // namespace

StateVector trial_state(TrialFamily family, const StateVector& psi0, Complex beta) {
  const int d = psi0.dim();
  const Vector& p = psi0.amplitudes();
  Vector u;
  if (family == TrialFamily::TwoLevel) {
    if (d < 3) fail(ErrorKind::InvalidDimension, "trial_state: two-level family needs dim >= 3");
    u = Vector::Zero(d);
    u(0) = std::conj(p(1));
    u(1) = -std::conj(p(0));
    u(2) = beta;
  } else {
    u = raw_coherent(beta, d);
  }
  const double pn = p.squaredNorm();
  u -= (p.dot(u) / pn) * p;
  const double n = u.norm();
  if (n < 1e-6) return {};
  u /= n;
  const double overlap = std::abs(p.dot(u)) / std::sqrt(pn);
  if (overlap > 1e-10)
    fail(ErrorKind::InvalidArgument, "trial_state: trial overlaps psi0 by " + std::to_string(overlap));
  return StateVector(std::move(u));
}

Complex family_center(TrialFamily family, const StateVector& psi0) {
  if (family == TrialFamily::TwoLevel) return 0.0;
  const Vector& p = psi0.amplitudes();
  Complex mean = 0.0;
  for (int k = 1; k < psi0.dim(); ++k) mean += std::conj(p(k - 1)) * std::sqrt(static_cast<double>(k)) * p(k);
  return mean / p.squaredNorm();
}

MinMaxResult minmax_search(const FockOperator& x, const StateVector& psi0, TrialFamily family,
                           const MinMaxOptions& options) {
  if (x.dim() != psi0.dim()) fail(ErrorKind::InvalidDimension, "minmax: operator and state dimensions differ");
  if (options.grid_points < 1 || !(options.radius >= 0.0))
    fail(ErrorKind::InvalidArgument, "minmax: empty trial family");

  MinMaxResult best{std::numeric_limits<double>::infinity(), 0.0, 0};
  auto eval = [&](Complex beta) {
    ++best.evaluations;
    const StateVector phi = trial_state(family, psi0, beta);
    if (phi.dim() == 0) return std::numeric_limits<double>::infinity();
    const Complex v = phi.amplitudes().dot(x.matrix() * phi.amplitudes());
    return v.real();
  };

  const Complex c = family_center(family, psi0);
  const int g = options.grid_points;
  const double step = g > 1 ? 2.0 * options.radius / (g - 1) : 0.0;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const Complex beta = g > 1 ? c + Complex(-options.radius + i * step, -options.radius + j * step) : c;
      const double v = eval(beta);
      if (v < best.bound) {
        best.bound = v;
        best.beta = beta;
      }
    }
  if (!std::isfinite(best.bound)) fail(ErrorKind::InvalidArgument, "minmax: empty trial family");

  if (options.refine) {
    double h = step > 0.0 ? step : 0.1;
    static const Complex dirs[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    while (h > 1e-9 && best.evaluations < 20000) {
      bool moved = false;
      for (Complex d : dirs) {
        const Complex beta = best.beta + h * d;
        const double v = eval(beta);
        if (v < best.bound) {
          best.bound = v;
          best.beta = beta;
          moved = true;
        }
      }
      if (!moved) h *= 0.5;
    }
  }
  return best;
}

double minmax_bound(const FockOperator& r, const StateVector& psi0, TrialFamily family,
                    const MinMaxOptions& options) {
  return minmax_search(r, psi0, family, options).bound;
}

double minmax_short_time(const GeneratorSpec& spec, const FockOperator& r0, const StateVector& psi0,
                         TrialFamily family, const MinMaxOptions& options) {
  return minmax_search(rhs(spec, r0), psi0, family, options).bound;
}

ExactPropagator::ExactPropagator(const FockOperator& h) : spectrum_(hermitian_eigen(h)) {
  basis_.resize(h.dim(), h.dim());
  for (int k = 0; k < h.dim(); ++k) basis_.col(k) = spectrum_.eigenvectors[k].amplitudes();
}

StateVector ExactPropagator::evolve(const StateVector& psi0, double t) const {
  if (psi0.dim() != basis_.rows()) fail(ErrorKind::InvalidDimension, "exact_evolve: dimension mismatch");
  Vector c = basis_.adjoint() * psi0.amplitudes();
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -spectrum_.eigenvalues[k] * t);
  return StateVector(basis_ * c);
}

StateVector exact_evolve(const StateVector& psi0, const FockOperator& h, double t) {
  return ExactPropagator(h).evolve(psi0, t);
}

double fidelity(const FockOperator& r, const StateVector& psi_t) {
  if (r.dim() != psi_t.dim()) fail(ErrorKind::InvalidDimension, "fidelity: dimension mismatch");
  const Complex v = psi_t.amplitudes().dot(r.matrix() * psi_t.amplitudes());
  if (std::abs(v.imag()) > 1e-10)
    fail(ErrorKind::NonHermitian, "fidelity: imaginary residue " + std::to_string(v.imag()));
  return v.real();
}

double self_correlation(const FockOperator& r, const StateVector& psi0) { return fidelity(r, psi0); }

double idempotency_defect(const FockOperator& r) { return (r.matrix() - r.matrix() * r.matrix()).norm(); }

RateEstimate rate_fit(const std::vector<std::pair<double, double>>& series, FitModel model) {
  if (series.size() < 5) fail(ErrorKind::InvalidArgument, "rate_fit: need at least 5 samples");
  RateEstimate est;
  est.samples = static_cast<int>(series.size());
  est.window = {series.front().first, series.front().first};
  for (const auto& [t, v] : series) {
    est.window.first = std::min(est.window.first, t);
    est.window.second = std::max(est.window.second, t);
  }

  std::vector<double> x, y;
  for (const auto& [t, v] : series) {
    if (model == FitModel::PowerLaw) {
      if (!(t > 0.0) || !(v > 0.0)) fail(ErrorKind::InvalidArgument, "rate_fit: power law needs positive t, value");
      x.push_back(std::log(t));
      y.push_back(std::log(v));
    } else {
      x.push_back(model == FitModel::Quadratic ? t * t : t);
      y.push_back(v);
    }
  }

  const double n = static_cast<double>(x.size());
  if (model == FitModel::Quadratic) {
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    if (sxx == 0.0) fail(ErrorKind::InvalidArgument, "rate_fit: all sample times are zero");
    est.slope = sxy / sxx;
  } else {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) fail(ErrorKind::InvalidArgument, "rate_fit: sample times are not distinct");
    est.slope = sxy / sxx;
    est.intercept = my - est.slope * mx;
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    est.residual = std::max(est.residual, std::abs(est.slope * x[i] + est.intercept - y[i]));
  return est;
}

}  // namespace twa
