#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "twa/analysis.hpp"

namespace twa {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Method { PhaseSpace, OperatorOde, ShortTime, Kraus, OracleCheck };

enum class Analysis { Spectrum, MinMax, Fidelity, SelfCorrelation, Purity, KrausCompleteness };

const char* to_string(Method m);
const char* to_string(Analysis a);

struct GridConfig {
  double r_max = 0.0;
  int points_per_axis = 0;
};

struct ScenarioConfig {
  MonomialParams hamiltonian;
  StateKind initial_state = CoherentKind{1.0};
  int dim = 20;
  std::optional<GridConfig> grid;  // default: PhaseGrid::for_center(centroid)
  double t_max = 0.1;
  int samples = 11;                // equally spaced in [0, t_max]
  Method method = Method::OperatorOde;
  std::vector<Analysis> analyses{Analysis::Spectrum, Analysis::Fidelity, Analysis::SelfCorrelation,
                                 Analysis::Purity};
  std::string output_dir = "out";
  double max_step = 0.0;           // RK4 step cap, 0 = automatic
  double kraus_dt = 1e-4;
  double dt_probe = 1e-4;
  bool dump_wigner = false;        // phase_space only

  bool has(Analysis a) const;
  std::vector<double> sample_times() const;
  PhaseGrid resolved_grid() const;
  // Throws InvalidArgument / InvalidDimension on inconsistent values.
  void validate() const;
};

/// Parses a scenario document; unknown keys are rejected.
ScenarioConfig config_from_json(const nlohmann::json& j);
/// Fully resolved form (every default explicit).
nlohmann::json config_to_json(const ScenarioConfig& c);
/// FNV-1a 64 of the resolved JSON, as 16 hex digits.
std::string config_hash(const ScenarioConfig& c);

ScenarioConfig load_config(const std::filesystem::path& path);

struct ResultRow {
  double t = 0.0;
  std::optional<double> lambda_min, lambda_max, negative_sum, trace, purity, fidelity, self_correlation,
      minmax_bound;
};

struct RunRecord {
  ScenarioConfig config;
  std::string hash;
  std::string version = kToolVersion;
  std::vector<ResultRow> rows;
  std::vector<Warning> warnings;
  std::optional<double> kraus_completeness;     // ||defect||_F at kraus_dt
  std::optional<RateEstimate> lambda_min_rate;  // linear fit over t > 0
  std::vector<FockOperator> states;             // R(t) per row (not persisted)
  std::vector<WignerField> fields;              // phase_space only (persisted on request)
};

/// R(t) at every sample time for the configured method.
std::vector<FockOperator> evolve_states(const ScenarioConfig& config, WarningLog& log,
                                        std::vector<WignerField>* fields = nullptr);

RunRecord run(const ScenarioConfig& config);

inline constexpr const char* kCsvHeader =
    "t,lambda_min,lambda_max,negative_sum,trace,purity,fidelity,self_correlation,minmax_bound";

std::string results_csv(const RunRecord& record);
nlohmann::json manifest(const RunRecord& record);
/// Writes results.csv, manifest.json and wigner_t*.csv into `dir`.
void write_run(const RunRecord& record, const std::filesystem::path& dir);

/// Process exit code for an error kind: 2 validation, 3 numerical, 4 I/O.
int exit_code(ErrorKind kind);

}  // namespace twa
