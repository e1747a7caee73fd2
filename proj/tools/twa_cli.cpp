#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "twa/parallel.hpp"
#include "twa/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) twa::fail(twa::ErrorKind::Io, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    twa::fail(twa::ErrorKind::InvalidArgument, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  out << text;
  if (!out) twa::fail(twa::ErrorKind::Io, "cannot write '" + path.string() + "'");
}

// Writes a minimal manifest recording a failed run, so the error is traceable.
void write_failure(const fs::path& dir, const std::string& hash, const twa::Error& e) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(dir / "manifest.json");
  out << json{{"tool_version", twa::kToolVersion},
              {"config_hash", hash},
              {"error", {{"kind", twa::to_string(e.kind())}, {"message", e.what()}}}}
             .dump(2)
      << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated Wigner approximation toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  bool seedless = false;
  app.add_option("--threads", threads, "worker threads (0 = available parallelism)")->check(CLI::NonNegativeNumber);
  app.add_flag("--seedless", seedless, "assert that no random numbers are used (none ever are)");

  std::string config_path, out_dir;
  auto* run_cmd = app.add_subcommand("run", "run one scenario");
  run_cmd->add_option("--config", config_path, "scenario JSON")->required();
  run_cmd->add_option("--out", out_dir, "output directory (overrides output_dir)");

  auto* cmp_cmd = app.add_subcommand("compare-routes", "phase-space vs operator-ODE discrepancy");
  cmp_cmd->add_option("--config", config_path, "scenario JSON")->required();
  cmp_cmd->add_option("--out", out_dir, "directory for compare_routes.csv");

  int dim = 12;
  bool no_laws = false;
  auto* err_cmd = app.add_subcommand("erratum-report", "numerical evidence for corrected formulas");
  err_cmd->add_option("--dim", dim, "basis size of the algebraic checks")->check(CLI::Range(6, 200));
  err_cmd->add_option("--out", out_dir, "directory for erratum.txt / erratum.json");
  err_cmd->add_flag("--no-laws", no_laws, "skip the short-time law measurements");

  auto* sweep_cmd = app.add_subcommand("sweep", "cartesian product of scenarios");
  sweep_cmd->add_option("--config", config_path, "JSON with 'base' scenario and 'axes'")->required();
  sweep_cmd->add_option("--out", out_dir, "root directory for the cells");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  twa::set_thread_count(static_cast<unsigned>(threads));

  std::string hash;
  fs::path failure_dir;
  try {
    if (*run_cmd) {
      twa::ScenarioConfig config = twa::load_config(config_path);
      if (!out_dir.empty()) config.output_dir = out_dir;
      failure_dir = config.output_dir;
      hash = twa::config_hash(config);
      const auto record = twa::run(config);
      twa::write_run(record, config.output_dir);
      std::cout << "wrote " << record.rows.size() << " rows to " << config.output_dir << " (config " << record.hash
                << ")\n";
      for (const auto& w : record.warnings) std::cerr << "warning [" << w.kind << "] " << w.message << "\n";
    } else if (*cmp_cmd) {
      const twa::ScenarioConfig config = twa::load_config(config_path);
      const auto cmp = twa::compare_routes(config);
      const std::string text = twa::to_text(cmp);
      std::cout << text;
      if (!out_dir.empty()) write_text(fs::path(out_dir) / "compare_routes.csv", text);
    } else if (*err_cmd) {
      const auto rep = twa::erratum_report(dim, !no_laws);
      std::cout << rep.text();
      if (!out_dir.empty()) {
        write_text(fs::path(out_dir) / "erratum.txt", rep.text());
        write_text(fs::path(out_dir) / "erratum.json", rep.to_json().dump(2) + "\n");
      }
    } else if (*sweep_cmd) {
      const json doc = read_json(config_path);
      if (!doc.contains("base") || !doc.contains("axes"))
        twa::fail(twa::ErrorKind::InvalidArgument, "sweep config needs 'base' and 'axes'");
      const fs::path root = out_dir.empty() ? fs::path(doc["base"].value("output_dir", "out")) : fs::path(out_dir);
      const auto cells = twa::sweep(doc["base"], doc["axes"], root);
      int worst = 0;
      for (const auto& c : cells) {
        std::cout << c.dir.string() << " " << c.overrides.dump() << " "
                  << (c.exit == 0 ? "ok" : "exit " + std::to_string(c.exit) + ": " + c.error) << "\n";
        worst = std::max(worst, c.exit);
      }
      return worst;
    }
  } catch (const twa::Error& e) {
    std::cerr << "error (" << twa::to_string(e.kind()) << "): " << e.what() << "\n";
    if (!failure_dir.empty() && e.kind() != twa::ErrorKind::Io) write_failure(failure_dir, hash, e);
    return twa::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
