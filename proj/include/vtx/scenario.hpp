#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "vtx/config.hpp"
#include "vtx/ensemble.hpp"
#include "vtx/trajectory.hpp"

namespace vtx {

/// Environment variable that replaces the default output root "runs".
inline constexpr const char* kOutputRootEnv = "VTX_OUTPUT_ROOT";

std::filesystem::path output_root();

/// Solvers a selection expands to, in output order.
std::vector<SolverSelection> expand_solvers(SolverSelection s);

/// Runs one single-vesicle config with one solver.
Trajectory solve_single(const RunConfig& cfg, SolverSelection solver);

/// Runs one population config with one solver.
EnsembleResult solve_ensemble(const RunConfig& cfg, SolverSelection solver, int workers);

struct ScenarioOutcome {
  std::filesystem::path dir;
  nlohmann::json manifest;
  bool self_check_passed = true;
  std::vector<std::string> errors;  // solver failures, also listed in the manifest
};

/// Writes config.json, manifest.json, light.csv and one CSV per
/// (variant, solver) trajectory or ensemble into `dir`.
ScenarioOutcome run_scenario(const RunConfig& cfg, const std::filesystem::path& dir, int workers = 1);

struct SweepRow {
  std::string series;
  std::string value;  // as given in the sweep
  double value_si = 0;
  int repetition = 0;
  std::string solver;
  std::string status = "ok";
  std::string error;
  double symport_start = 0;     // first cycle; NaN when no symport occurs
  double symport_end = 0;
  double symport_duration = 0;  // 0 for a type-b first cycle
  double min_illumination = 0;  // closed-form light time needed to reach C_switch
  double peak_c_h_in = 0;
  double c_s_out_light_off = 0;  // at the end of the first window
  double terminal_c_s_out = 0;
  double depletion_time = 0;    // NaN when not depleted
  double terminal_var_c_s_out = 0;  // ensembles only, NaN otherwise
};

/// Evaluates every (series, value, repetition, solver) point; per-point
/// failures are reported in the row instead of thrown.
std::vector<SweepRow> compute_sweep(const RunConfig& cfg, int workers = 1);

/// Writes config.json, manifest.json and summary.csv into `dir`.
ScenarioOutcome run_sweep(const RunConfig& cfg, const std::filesystem::path& dir, int workers = 1);

/// Converts the artifacts listed in `run_dir`/manifest.json into long-format
/// files (series,t,value) under `run_dir`/plot. Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& run_dir);

}  // namespace vtx
