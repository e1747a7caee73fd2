#include "twa/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "twa/classical.hpp"

namespace twa {

using nlohmann::json;

namespace {

struct MethodName {
  Method method;
  const char* name;
};
constexpr MethodName kMethods[] = {{Method::PhaseSpace, "phase_space"},
                                   {Method::OperatorOde, "operator_ode"},
                                   {Method::ShortTime, "short_time"},
                                   {Method::Kraus, "kraus"},
                                   {Method::OracleCheck, "oracle_check"}};

struct AnalysisName {
  Analysis analysis;
  const char* name;
};
constexpr AnalysisName kAnalyses[] = {{Analysis::Spectrum, "spectrum"},
                                      {Analysis::MinMax, "minmax"},
                                      {Analysis::Fidelity, "fidelity"},
                                      {Analysis::SelfCorrelation, "self_correlation"},
                                      {Analysis::Purity, "purity"},
                                      {Analysis::KrausCompleteness, "kraus_completeness"}};

Method parse_method(const std::string& s) {
  for (const auto& m : kMethods)
    if (s == m.name) return m.method;
  fail(ErrorKind::InvalidArgument, "config: unknown method '" + s + "'");
}

Analysis parse_analysis(const std::string& s) {
  for (const auto& a : kAnalyses)
    if (s == a.name) return a.analysis;
  fail(ErrorKind::InvalidArgument, "config: unknown analysis '" + s + "'");
}

Complex parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
  fail(ErrorKind::InvalidArgument, "config: complex values are a number, [re, im] or {re, im}");
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) fail(ErrorKind::InvalidArgument, "config: unknown key '" + k + "' in " + where);
  }
}

Complex centroid(const StateKind& kind) {
  if (const auto* c = std::get_if<CoherentKind>(&kind)) return c->alpha;
  if (const auto* f = std::get_if<FockKind>(&kind)) return std::sqrt(static_cast<double>(f->n));
  return 0.0;
}

}  // namespace

const char* to_string(Method m) {
  for (const auto& x : kMethods)
    if (x.method == m) return x.name;
  return "?";
}

const char* to_string(Analysis a) {
  for (const auto& x : kAnalyses)
    if (x.analysis == a) return x.name;
  return "?";
}

bool ScenarioConfig::has(Analysis a) const {
  for (auto x : analyses)
    if (x == a) return true;
  return false;
}

std::vector<double> ScenarioConfig::sample_times() const {
  std::vector<double> ts;
  if (samples == 1) return {0.0};
  for (int k = 0; k < samples; ++k) ts.push_back(t_max * k / (samples - 1));
  return ts;
}

PhaseGrid ScenarioConfig::resolved_grid() const {
  if (grid) return PhaseGrid(grid->r_max, grid->points_per_axis);
  return PhaseGrid::for_center(centroid(initial_state));
}

void ScenarioConfig::validate() const {
  hamiltonian.validate();
  if (dim < 2) fail(ErrorKind::InvalidDimension, "config: dim must be at least 2");
  if (hamiltonian.n >= dim) fail(ErrorKind::InvalidDimension, "config: dim must exceed the monomial power n");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) fail(ErrorKind::InvalidArgument, "config: t_max must be >= 0");
  if (samples < 1) fail(ErrorKind::InvalidArgument, "config: samples must be positive");
  if (max_step < 0.0) fail(ErrorKind::InvalidArgument, "config: max_step must be >= 0");
  if (!(kraus_dt > 0.0)) fail(ErrorKind::InvalidArgument, "config: kraus_dt must be positive");
  if (!(dt_probe > 0.0)) fail(ErrorKind::InvalidArgument, "config: dt_probe must be positive");
  if (grid && (!(grid->r_max > 0.0) || grid->points_per_axis < 2))
    fail(ErrorKind::InvalidArgument, "config: grid needs r_max > 0 and points_per_axis >= 2");
  if (const auto* f = std::get_if<FockKind>(&initial_state); f && (f->n < 0 || f->n >= dim - 1))
    fail(ErrorKind::InvalidDimension, "config: Fock level must lie below dim - 1");
  if (has(Analysis::MinMax) && dim < 3) fail(ErrorKind::InvalidDimension, "config: minmax needs dim >= 3");
  if (has(Analysis::KrausCompleteness) && method != Method::Kraus)
    fail(ErrorKind::InvalidArgument, "config: kraus_completeness requires method 'kraus'");
  if (dump_wigner && method != Method::PhaseSpace)
    fail(ErrorKind::InvalidArgument, "config: dump_wigner requires method 'phase_space'");
}

ScenarioConfig config_from_json(const json& j) {
  try {
    if (!j.is_object()) fail(ErrorKind::InvalidArgument, "config: top level must be an object");
    reject_unknown(j, {"hamiltonian", "initial_state", "dim", "grid", "time", "method", "analyses", "output_dir",
                       "numerics", "dump_wigner"},
                   "scenario");
    ScenarioConfig c;
    if (j.contains("hamiltonian")) {
      const auto& h = j.at("hamiltonian");
      reject_unknown(h, {"m", "n", "coupling"}, "hamiltonian");
      c.hamiltonian.m = h.value("m", 1);
      c.hamiltonian.n = h.value("n", 1);
      c.hamiltonian.coupling = h.value("coupling", 1.0);
    }
    if (j.contains("initial_state")) {
      const auto& s = j.at("initial_state");
      reject_unknown(s, {"kind", "alpha", "n"}, "initial_state");
      const std::string kind = s.at("kind").get<std::string>();
      if (kind == "coherent") {
        c.initial_state = CoherentKind{parse_complex(s.at("alpha"))};
      } else if (kind == "low_excited") {
        c.initial_state = LowExcitedKind{parse_complex(s.at("alpha"))};
      } else if (kind == "fock") {
        c.initial_state = FockKind{s.at("n").get<int>()};
      } else {
        fail(ErrorKind::InvalidArgument, "config: unknown initial_state kind '" + kind + "'");
      }
    }
    c.dim = j.value("dim", c.dim);
    if (j.contains("grid") && !j.at("grid").is_null()) {
      const auto& g = j.at("grid");
      reject_unknown(g, {"r_max", "points_per_axis"}, "grid");
      c.grid = GridConfig{g.at("r_max").get<double>(), g.at("points_per_axis").get<int>()};
    }
    if (j.contains("time")) {
      const auto& t = j.at("time");
      reject_unknown(t, {"t_max", "samples"}, "time");
      c.t_max = t.value("t_max", c.t_max);
      c.samples = t.value("samples", c.samples);
    }
    if (j.contains("method")) c.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("analyses")) {
      c.analyses.clear();
      for (const auto& a : j.at("analyses")) c.analyses.push_back(parse_analysis(a.get<std::string>()));
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    if (j.contains("numerics")) {
      const auto& n = j.at("numerics");
      reject_unknown(n, {"max_step", "kraus_dt", "dt_probe"}, "numerics");
      c.max_step = n.value("max_step", c.max_step);
      c.kraus_dt = n.value("kraus_dt", c.kraus_dt);
      c.dt_probe = n.value("dt_probe", c.dt_probe);
    }
    c.dump_wigner = j.value("dump_wigner", c.dump_wigner);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("config: ") + e.what());
  }
}

json config_to_json(const ScenarioConfig& c) {
  json state;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, FockKind>) {
          state = {{"kind", "fock"}, {"n", k.n}};
        } else if constexpr (std::is_same_v<K, CoherentKind>) {
          state = {{"kind", "coherent"}, {"alpha", complex_json(k.alpha)}};
        } else {
          state = {{"kind", "low_excited"}, {"alpha", complex_json(k.alpha)}};
        }
      },
      c.initial_state);
  const PhaseGrid g = c.resolved_grid();
  json analyses = json::array();
  for (auto a : c.analyses) analyses.push_back(to_string(a));
  return {
      {"hamiltonian", {{"m", c.hamiltonian.m}, {"n", c.hamiltonian.n}, {"coupling", c.hamiltonian.coupling}}},
      {"initial_state", state},
      {"dim", c.dim},
      {"grid", {{"r_max", g.r_max()}, {"points_per_axis", g.points_per_axis()}}},
      {"time", {{"t_max", c.t_max}, {"samples", c.samples}}},
      {"method", to_string(c.method)},
      {"analyses", analyses},
      {"output_dir", c.output_dir},
      {"numerics", {{"max_step", c.max_step}, {"kraus_dt", c.kraus_dt}, {"dt_probe", c.dt_probe}}},
      {"dump_wigner", c.dump_wigner},
  };
}

std::string config_hash(const ScenarioConfig& c) {
  json j = config_to_json(c);
  j.erase("output_dir");  // where results go does not change them
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, "config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::vector<FockOperator> evolve_states(const ScenarioConfig& config, WarningLog& log,
                                        std::vector<WignerField>* fields) {
  config.validate();
  const int dim = config.dim;
  const StateVector psi0 = state_prep(config.initial_state, dim);
  const FockOperator rho0 = psi0.projector();
  check_truncation(rho0, "initial state");
  const auto times = config.sample_times();
  std::vector<FockOperator> states;

  auto explicit_or_oracle = [&]() {
    const auto& p = config.hamiltonian;
    const bool known = (p.m == 1 && p.n == 1) || (p.m == 2 && p.n == 2) || (p.m == 1 && p.n == 2);
    if (known && config.method != Method::OracleCheck) return generator_for(p, dim);
    return oracle_spec(p, dim, config.resolved_grid(), config.dt_probe, &log);
  };

  switch (config.method) {
    case Method::PhaseSpace: {
      const PhaseGrid grid = config.resolved_grid();
      const KernelCache cache(grid, dim);
      for (double t : times) {
        WignerField field = twa_field(rho0, grid, config.hamiltonian, t);
        states.push_back(inverse_map(field, dim, &cache, &log));
        if (fields != nullptr) fields->push_back(std::move(field));
      }
      break;
    }
    case Method::OperatorOde:
    case Method::OracleCheck: {
      const GeneratorSpec spec = explicit_or_oracle();
      states = evolve_R(spec, rho0, times, config.max_step).states;
      break;
    }
    case Method::ShortTime: {
      const GeneratorSpec spec = explicit_or_oracle();
      for (double t : times) states.push_back(short_time_R(spec, rho0, t));
      break;
    }
    case Method::Kraus: {
      const GeneratorSpec spec = generator_for(config.hamiltonian, dim);
      const KrausSet set = kraus_operators(spec, config.kraus_dt);
      FockOperator r = rho0;
      double t = 0.0;
      for (double target : times) {
        const int steps = static_cast<int>(std::lround((target - t) / config.kraus_dt));
        if (std::abs(steps * config.kraus_dt - (target - t)) > 1e-9 * std::max(1.0, target))
          warn(&log, "step", "kraus: sample spacing is not a multiple of kraus_dt; rounded to " +
                                 std::to_string(steps) + " steps");
        for (int s = 0; s < steps; ++s) r = kraus_apply(set, r);
        t = target;
        states.push_back(r);
      }
      break;
    }
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double top = std::abs(states[i](dim - 1, dim - 1));
    if (top > kTruncationThreshold)
      warn(&log, "tail", "R(t=" + std::to_string(times[i]) + ") has weight " + std::to_string(top) +
                             " on the top Fock level");
  }
  return states;
}

RunRecord run(const ScenarioConfig& config) {
  config.validate();
  WarningLog log;
  RunRecord rec;
  rec.config = config;
  rec.hash = config_hash(config);

  const int dim = config.dim;
  const StateVector psi0 = state_prep(config.initial_state, dim);
  const auto times = config.sample_times();
  rec.states = evolve_states(config, log, config.dump_wigner ? &rec.fields : nullptr);

  std::vector<Spectrum> spectra;
  if (config.has(Analysis::Spectrum)) spectra = hermitian_eigen_all(rec.states);

  std::optional<ExactPropagator> exact;
  if (config.has(Analysis::Fidelity)) exact.emplace(symmetrized_hamiltonian(config.hamiltonian, dim));
  const TrialFamily family = std::holds_alternative<CoherentKind>(config.initial_state)
                                 ? TrialFamily::CoherentOrthogonalized
                                 : TrialFamily::TwoLevel;

  rec.rows.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    ResultRow& row = rec.rows[i];
    const FockOperator& r = rec.states[i];
    row.t = times[i];
    row.trace = r.trace().real();
    if (!spectra.empty()) {
      const auto neg = negativity(spectra[i]);
      row.lambda_min = neg.lambda_min;
      row.lambda_max = spectra[i].eigenvalues.front();
      row.negative_sum = neg.negative_sum;
    }
    if (config.has(Analysis::Purity)) row.purity = (r * r).trace().real();
    if (exact) row.fidelity = fidelity(r, exact->evolve(psi0, times[i]));
    if (config.has(Analysis::SelfCorrelation)) row.self_correlation = self_correlation(r, psi0);
    if (config.has(Analysis::MinMax)) row.minmax_bound = minmax_bound(r, psi0, family);
  }

  if (config.has(Analysis::KrausCompleteness))
    rec.kraus_completeness =
        kraus_completeness_defect(kraus_operators(generator_for(config.hamiltonian, dim), config.kraus_dt))
            .frobenius_norm();

  if (!spectra.empty()) {
    std::vector<std::pair<double, double>> series;
    for (const auto& row : rec.rows)
      if (row.t > 0.0) series.push_back({row.t, *row.lambda_min});
    if (series.size() >= 5) rec.lambda_min_rate = rate_fit(series);
  }
  rec.warnings = log.entries();
  return rec;
}

namespace {

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return s.str();
}

std::string field(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

}  // namespace

std::string results_csv(const RunRecord& record) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : record.rows) {
    out += number(r.t);
    for (const auto* v : {&r.lambda_min, &r.lambda_max, &r.negative_sum, &r.trace, &r.purity, &r.fidelity,
                          &r.self_correlation, &r.minmax_bound})
      out += "," + field(*v);
    out += "\n";
  }
  return out;
}

json manifest(const RunRecord& record) {
  json warnings = json::array();
  for (const auto& w : record.warnings) warnings.push_back({{"kind", w.kind}, {"message", w.message}});
  json j = {
      {"tool_version", record.version},
      {"config_hash", record.hash},
      {"config", config_to_json(record.config)},
      {"rows", record.rows.size()},
      {"columns", kCsvHeader},
      {"warnings", warnings},
  };
  if (record.kraus_completeness) j["kraus_completeness_defect"] = *record.kraus_completeness;
  if (record.lambda_min_rate) {
    const auto& r = *record.lambda_min_rate;
    j["lambda_min_rate"] = {{"slope", r.slope},
                            {"intercept", r.intercept},
                            {"residual", r.residual},
                            {"window", {r.window.first, r.window.second}},
                            {"samples", r.samples}};
  }
  return j;
}

void write_run(const RunRecord& record, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory '" + dir.string() + "': " + ec.message());

  auto write = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) fail(ErrorKind::Io, "cannot write '" + p.string() + "'");
  };
  write(dir / "results.csv", results_csv(record));
  write(dir / "manifest.json", manifest(record).dump(2) + "\n");
  for (std::size_t i = 0; i < record.fields.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "wigner_t%03zu.csv", i);
    std::ostringstream s;
    write_field_csv(record.fields[i], s);
    write(dir / name, s.str());
  }
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Divergence:
    case ErrorKind::NonConvergence:
    case ErrorKind::StepSize:
      return 3;
    case ErrorKind::Io:
      return 4;
    default:
      return 2;
  }
}

}  // namespace twa
