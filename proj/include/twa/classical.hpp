#pragma once

#include <vector>

#include "twa/phasespace.hpp"

namespace twa {

/// alpha_dot = -i dW_H/dalpha* = -i coupling (m a*^{m-1} a^n + n a^m a*^{n-1})
Complex hamilton_velocity(const MonomialParams& params, Complex alpha);

struct TrajectorySample {
  double t;
  Complex alpha;
};

struct Trajectory {
  Complex start;
  Complex end;
  double duration = 0.0;  // signed
  int steps = 0;
};

/// Step size rule for the fixed-step RK4 flow: min(1e-3, 0.01 / max(1, |v(alpha0)|)).
double flow_step(const MonomialParams& params, Complex alpha0);

/// Classical RK4 endpoint after time t (negative t runs the reversed field).
/// Uses max(steps, ceil(|t| / flow_step)) steps. Throws Divergence when the
/// state becomes non-finite or leaves |alpha| <= 10 (|alpha0| + 1).
/// `dump`, when given, receives every intermediate point.
Trajectory flow(const MonomialParams& params, Complex alpha0, double t, int steps = 0,
                std::vector<TrajectorySample>* dump = nullptr);

/// Truncated Wigner field at time t: W(alpha|t) = Tr(rho0 w(alpha(-t))),
/// where alpha(-t) is the backward flow from each node. The initial symbol
/// is evaluated exactly at the pre-image; nothing is interpolated.
WignerField twa_field(const FockOperator& rho0, const PhaseGrid& grid, const MonomialParams& params,
                      double t);

/// sum (h^2/pi) W_f W_field
double twa_expectation(const FockOperator& f, const WignerField& field, const KernelCache* cache = nullptr);

/// R(t) = sum (h^2/pi) w(alpha) W_rho(alpha(-t)).
FockOperator reconstruct_R(const FockOperator& rho0, const PhaseGrid& grid, const MonomialParams& params,
                           double t, const KernelCache* cache = nullptr, WarningLog* log = nullptr);

/// Backward pre-images alpha(-t) of every grid node.
std::vector<Complex> preimages(const PhaseGrid& grid, const MonomialParams& params, double t);

}  // namespace twa
