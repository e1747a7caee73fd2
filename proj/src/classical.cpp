#include "twa/classical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "twa/parallel.hpp"

namespace twa {

Complex hamilton_velocity(const MonomialParams& params, Complex alpha) {
  const Complex ac = std::conj(alpha);
  Complex d = 0.0;
  if (params.m > 0) d += static_cast<double>(params.m) * std::pow(ac, params.m - 1) * std::pow(alpha, params.n);
  if (params.n > 0) d += static_cast<double>(params.n) * std::pow(alpha, params.m) * std::pow(ac, params.n - 1);
  return -kI * params.coupling * d;
}

double flow_step(const MonomialParams& params, Complex alpha0) {
  const double speed = std::abs(hamilton_velocity(params, alpha0));
  return std::min(1e-3, 0.01 / std::max(1.0, speed));
}

Trajectory flow(const MonomialParams& params, Complex alpha0, double t, int steps,
                std::vector<TrajectorySample>* dump) {
  if (!std::isfinite(t)) fail(ErrorKind::InvalidArgument, "flow: non-finite duration");
  const double h_max = flow_step(params, alpha0);
  const int needed = static_cast<int>(std::ceil(std::abs(t) / h_max - 1e-12));
  const int n = std::max({steps, needed, t == 0.0 ? 0 : 1});
  const double h = n == 0 ? 0.0 : t / n;
  const double escape = 10.0 * (std::abs(alpha0) + 1.0);

  auto v = [&](Complex z) { return hamilton_velocity(params, z); };
  Complex z = alpha0;
  if (dump != nullptr) dump->push_back({0.0, z});
  for (int s = 0; s < n; ++s) {
    const Complex k1 = v(z);
    const Complex k2 = v(z + 0.5 * h * k1);
    const Complex k3 = v(z + 0.5 * h * k2);
    const Complex k4 = v(z + h * k3);
    z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > escape)
      fail(ErrorKind::Divergence, "flow: trajectory from (" + std::to_string(alpha0.real()) + "," +
                                      std::to_string(alpha0.imag()) + ") escaped at step " +
                                      std::to_string(s + 1));
    if (dump != nullptr) dump->push_back({(s + 1) * h, z});
  }
  return {alpha0, z, t, n};
}

std::vector<Complex> preimages(const PhaseGrid& grid, const MonomialParams& params, double t) {
  std::vector<Complex> out(grid.size());
  std::vector<char> diverged(grid.size(), 0);
  parallel_for(grid.size(), [&](std::size_t i) {
    try {
      out[i] = flow(params, grid.node(i), -t).end;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Divergence) throw;
      diverged[i] = 1;
    }
  });

  const auto bad = std::count(diverged.begin(), diverged.end(), 1);
  if (bad > 0) {
    const auto first = static_cast<std::size_t>(std::find(diverged.begin(), diverged.end(), 1) - diverged.begin());
    const Complex z = grid.node(first);
    fail(ErrorKind::Divergence, std::to_string(bad) + " grid node trajectories diverged (first at (" +
                                    std::to_string(z.real()) + "," + std::to_string(z.imag()) + "))");
  }
  return out;
}

WignerField twa_field(const FockOperator& rho0, const PhaseGrid& grid, const MonomialParams& params, double t) {
  params.validate();
  if (!rho0.is_hermitian(1e-10)) fail(ErrorKind::NonHermitian, "twa_field: rho0 is not Hermitian");
  if (std::abs(rho0.trace() - 1.0) > 1e-8) fail(ErrorKind::InvalidArgument, "twa_field: rho0 must have unit trace");

  const auto pre = preimages(grid, params, t);
  WignerField field{grid, std::vector<double>(grid.size())};
  parallel_for(grid.size(), [&](std::size_t i) { field.values[i] = symbol_at(rho0, pre[i]); });
  return field;
}

double twa_expectation(const FockOperator& f, const WignerField& field, const KernelCache* cache) {
  return overlap(symbol(f, field.grid, cache), field);
}

FockOperator reconstruct_R(const FockOperator& rho0, const PhaseGrid& grid, const MonomialParams& params,
                           double t, const KernelCache* cache, WarningLog* log) {
  return inverse_map(twa_field(rho0, grid, params, t), rho0.dim(), cache, log);
}

}  // namespace twa
