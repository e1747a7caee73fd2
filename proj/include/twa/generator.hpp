#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "twa/phasespace.hpp"

namespace twa {

/// Linear map on dim x dim operators, stored as a dim^2 x dim^2 matrix
/// acting on column-stacked operators: vec(R)[i + j*dim] = R(i, j).
struct SuperOperator {
  int dim = 0;
  Matrix matrix;

  FockOperator apply(const FockOperator& r) const;
  static SuperOperator from_map(int dim, const std::function<FockOperator(const FockOperator&)>& map);
};

Vector vec(const FockOperator& r);
FockOperator unvec(const Vector& v, int dim);

/// R -> weight (2 L R L^dag - L^dag L R - R L^dag L)
struct LindbladChannel {
  double weight = 0.0;
  FockOperator op;
  std::string label;
};

// coefficient * left * R * right
struct FTerm {
  Complex coefficient;
  FockOperator left;
  FockOperator right;
};

/// Right-hand side of dR/dt = i[R, H_eff] + L(R). The dissipative part comes
/// from the channel list; `f_form` is the equivalent L(R) = i(F(R) - F^dag(R))
/// used for cross-checks. An `oracle`, when set, replaces the whole rhs.
struct GeneratorSpec {
  std::string name;
  FockOperator h_eff;
  std::vector<LindbladChannel> channels;
  std::optional<std::vector<FTerm>> f_form;
  std::optional<SuperOperator> oracle;

  int dim() const { return h_eff.dim(); }
};

FockOperator channel_apply(const LindbladChannel& ch, const FockOperator& r);

struct LPair {
  FockOperator L;
  FockOperator L_tilde;
};

/// L_jk^{pq} = a^dag^j a^k - i a^{p-j} a^dag^{q-k},  L~_jk^{pq} = (L_kj^{qp})^dag.
/// Products of ladder powers are formed in normal order, so entries are
/// exact on the truncated basis. Throws InvalidArgument when an index is out
/// of range for either operator.
LPair build_L_jk(int p, int q, int j, int k, int dim);

GeneratorSpec harmonic_generator(int dim, double coupling = 1.0);
GeneratorSpec kerr_generator(int dim, double coupling = 1.0);
GeneratorSpec shg_generator(int dim, double coupling = 1.0);

/// Explicit generator for (1,1), (2,2) and (1,2); other monomials throw
/// InvalidArgument (use oracle_spec).
GeneratorSpec generator_for(const MonomialParams& params, int dim);

/// sum of channel actions
FockOperator dissipator(const GeneratorSpec& spec, const FockOperator& r);
/// i (F(R) - F(R^dag)^dag), complex-linear in R
FockOperator f_form_dissipator(const std::vector<FTerm>& terms, const FockOperator& r);

FockOperator rhs(const GeneratorSpec& spec, const FockOperator& r);

/// The assembled generator (commutator + channels, or the oracle) restricted
/// to the operators supported on levels < `levels`.
SuperOperator assembled_superoperator(const GeneratorSpec& spec, int levels);

/// Linear map rho0 -> R(t) of the phase-space route, restricted to levels < `levels`.
SuperOperator twa_transfer(const MonomialParams& params, int levels, const PhaseGrid& grid, double t);

/// Generator of the phase-space route on levels < `levels`, by central
/// difference (R(+dt) - R(-dt)) / (2 dt) of the exact kernel sum. Warns
/// ("conditioning") when the order-dt^2 remainder, estimated from a second
/// probe at 2 dt, exceeds 1e-3 of the generator norm.
SuperOperator oracle_generator(const MonomialParams& params, int levels, const PhaseGrid& grid,
                               double dt_probe = 1e-4, WarningLog* log = nullptr);

/// Generator spec whose rhs is the phase-space oracle on the full basis.
GeneratorSpec oracle_spec(const MonomialParams& params, int dim, const PhaseGrid& grid,
                          double dt_probe = 1e-4, WarningLog* log = nullptr);

/// Largest |eigenvalue| of the rhs map, estimated by power iteration.
double spectral_radius_estimate(const GeneratorSpec& spec);

/// Default RK4 step: min(1e-3, 0.5 / spectral radius).
double default_rk4_step(const GeneratorSpec& spec);

struct Evolution {
  std::vector<double> times;
  std::vector<FockOperator> states;
};

/// RK4 on the operator equation; returns R at each of `sample_times`
/// (non-decreasing, >= 0) using steps no longer than `max_step`
/// (0 selects default_rk4_step). Throws StepSize if Tr R drifts by more
/// than 1e-8.
Evolution evolve_R(const GeneratorSpec& spec, const FockOperator& r0, const std::vector<double>& sample_times,
                   double max_step = 0.0);

/// Final state after t with exactly `steps` RK4 steps.
FockOperator evolve_R(const GeneratorSpec& spec, const FockOperator& r0, double t, int steps);

/// R0 + t (i[R0, H_eff] + L(R0))
FockOperator short_time_R(const GeneratorSpec& spec, const FockOperator& r0, double t);

enum class KrausConvention {
  // K_j = sqrt(2|w_j| dt) L_j, K0 = I - i dt H_eff - dt sum_j w_j L_j^dag L_j
  DriftCompleted,
  // K_j = |w_j| sqrt(dt) L_j, K0 = I - i dt H_eff (coefficients as printed for Kerr)
  AsPrinted,
};

struct KrausOperator {
  int sign = 1;
  FockOperator op;
};

struct KrausSet {
  FockOperator k0;
  std::vector<KrausOperator> terms;
};

KrausSet kraus_operators(const GeneratorSpec& spec, double dt,
                         KrausConvention convention = KrausConvention::DriftCompleted);
FockOperator kraus_apply(const KrausSet& set, const FockOperator& r);
FockOperator kraus_step(const GeneratorSpec& spec, const FockOperator& r, double dt,
                        KrausConvention convention = KrausConvention::DriftCompleted);
/// K0 K0^dag + sum_j (+/-) K_j K_j^dag - I
FockOperator kraus_completeness_defect(const KrausSet& set);

}  // namespace twa
