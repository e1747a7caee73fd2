#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "twa/scenario.hpp"

namespace twa {

struct RouteComparison {
  std::vector<double> times;
  std::vector<double> discrepancies;  // ||R_phase - R_ode||_F per sample
  double max_discrepancy = 0.0;
  std::vector<Warning> warnings;
};

/// Runs the phase-space and operator-ODE routes on the same scenario.
RouteComparison compare_routes(const ScenarioConfig& config);
std::string to_text(const RouteComparison& c);

/// Short-time laws of the TWA operator against the exact pure-state evolution.
struct LawMeasurement {
  RateEstimate infidelity;       // 1 - F, quadratic coefficient
  RateEstimate infidelity_power; // exponent of 1 - F
  RateEstimate decorrelation;    // 1 - G, quadratic coefficient
};

/// Samples t_k = t_max k / samples, k = 1..samples, on the operator-ODE route.
LawMeasurement measure_laws(const GeneratorSpec& spec, const FockOperator& h_exact, const StateVector& psi0,
                            double t_max, int samples = 10);

/// lambda_min(R(t)) slope and the matching lambda_max of the pair created
/// at t = 0+ (second eigenvalue), fitted over t in [t_min, t_max].
struct NegativityRate {
  RateEstimate lambda_min;
  RateEstimate lambda_plus;
};
NegativityRate measure_negativity_rate(const GeneratorSpec& spec, const StateVector& psi0, double t_min,
                                       double t_max, int samples = 10);

struct Finding {
  std::string id;
  std::string title;
  double printed = 0.0;    // value implied by the printed formula
  double measured = 0.0;   // value measured by this code
  double corrected = 0.0;  // value of the corrected formula (== printed when it holds)
  bool printed_holds = false;
  std::string detail;
};

struct ErratumReport {
  int dim = 0;
  std::vector<Finding> findings;
  const Finding* find(const std::string& id) const;
  std::string text() const;
  nlohmann::json to_json() const;
};

/// Numerical evidence for every printed formula that the code had to
/// correct or could not reproduce. `dim` sets the basis of the algebraic
/// checks; the short-time law measurements use their own bases.
ErratumReport erratum_report(int dim, bool include_laws = true);

struct SweepCell {
  int index = 0;
  nlohmann::json overrides;
  std::string hash;
  std::filesystem::path dir;
  int exit = 0;
  std::string error;
};

/// Cartesian product over `axes` (JSON pointer, e.g. "/hamiltonian/coupling",
/// -> list of values) applied to `base`; each cell is run and written to
/// out/cell_NNN. Cells run concurrently; a failing cell does not stop the rest.
std::vector<SweepCell> sweep(const nlohmann::json& base, const nlohmann::json& axes,
                             const std::filesystem::path& out);

}  // namespace twa
