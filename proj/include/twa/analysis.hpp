#pragma once

#include <utility>
#include <vector>

#include "twa/generator.hpp"

namespace twa {

struct Spectrum {
  std::vector<double> eigenvalues;         // descending
  std::vector<StateVector> eigenvectors;   // orthonormal, same order
  double residual = 0.0;                   // max_k ||R v_k - l_k v_k||
  double orthonormality_defect = 0.0;      // max |V^dag V - I|
};

/// Full spectrum of a Hermitian operator by cyclic Jacobi rotations.
/// Throws NonHermitian for non-Hermitian input and NonConvergence if the
/// residual or Gram checks fail.
Spectrum hermitian_eigen(const FockOperator& r);

/// Spectra of many operators, computed concurrently.
std::vector<Spectrum> hermitian_eigen_all(const std::vector<FockOperator>& ops);

struct SumRules {
  double s1 = 0.0;      // sum l
  double s2 = 0.0;      // sum l^2
  double defect = 0.0;  // sum l (1 - l)
};
SumRules sum_rules(const Spectrum& spec);

struct Negativity {
  double lambda_min = 0.0;
  double negative_sum = 0.0;  // sum of the negative eigenvalues
};
Negativity negativity(const Spectrum& spec);

enum class TrialFamily {
  // (v + beta |2>) projected orthogonal to psi0, v the vector in span{|0>,|1>}
  // orthogonal to psi0's leading pair; for psi0 = |0> + a|1> this is
  // a*|0> - |1> + beta|2>.
  TwoLevel,
  // |beta> - <psi0|beta> |psi0>
  CoherentOrthogonalized,
};

struct MinMaxOptions {
  int grid_points = 21;   // per axis
  double radius = 2.0;    // half-width of the beta square
  bool refine = true;     // pattern search from the best grid point
};

/// Trial state of the family at beta, normalized and orthogonal to psi0;
/// empty (dim 0) when the construction degenerates.
StateVector trial_state(TrialFamily family, const StateVector& psi0, Complex beta);

/// Centre of the beta grid: 0 for TwoLevel, <psi0|a|psi0> for coherent trials.
Complex family_center(TrialFamily family, const StateVector& psi0);

struct MinMaxResult {
  double bound = 0.0;
  Complex beta;
  int evaluations = 0;
};

/// min over the family of <phi|X|phi>, X Hermitian. Every trial is checked
/// to be orthogonal to psi0 within 1e-10.
MinMaxResult minmax_search(const FockOperator& x, const StateVector& psi0, TrialFamily family,
                           const MinMaxOptions& options = {});

/// Upper bound on lambda_min(R) from the trial family.
double minmax_bound(const FockOperator& r, const StateVector& psi0, TrialFamily family,
                    const MinMaxOptions& options = {});

/// min over the family of <phi|rhs(R0)|phi>: the first-order rate of the bound.
double minmax_short_time(const GeneratorSpec& spec, const FockOperator& r0, const StateVector& psi0,
                         TrialFamily family, const MinMaxOptions& options = {});

/// Unitary propagation through the eigenbasis of a Hermitian H.
class ExactPropagator {
 public:
  explicit ExactPropagator(const FockOperator& h);
  StateVector evolve(const StateVector& psi0, double t) const;

 private:
  Spectrum spectrum_;
  Matrix basis_;
};

StateVector exact_evolve(const StateVector& psi0, const FockOperator& h, double t);

/// <psi|R|psi>; throws NonHermitian when the imaginary part exceeds 1e-10.
double fidelity(const FockOperator& r, const StateVector& psi_t);
/// <psi0|R|psi0>
double self_correlation(const FockOperator& r, const StateVector& psi0);

// ||R - R^2||_F
double idempotency_defect(const FockOperator& r);

enum class FitModel {
  Linear,     // value = slope t + intercept
  Quadratic,  // value = slope t^2 (e.g. 1 - F)
  PowerLaw,   // log value = slope log t + intercept
};

struct RateEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |fit - value|
  std::pair<double, double> window{0.0, 0.0};
  int samples = 0;
};

/// Least squares over the whole series (>= 5 points).
RateEstimate rate_fit(const std::vector<std::pair<double, double>>& series, FitModel model = FitModel::Linear);

}  // namespace twa
