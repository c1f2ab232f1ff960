#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "vtx/analytic.hpp"
#include "vtx/cycle_schedule.hpp"
#include "vtx/ensemble.hpp"
#include "vtx/fdm.hpp"
#include "vtx/model.hpp"

namespace vtx {

enum class SolverSelection { fdm, exact, closed, all };

SolverSelection parse_solver(std::string_view text, const std::string& field = "solver");
std::string_view to_string(SolverSelection s);

/// Parameter assignments applied on top of a base config. Keys are dotted
/// paths into the config tree ("environment.buffer_molarity") or one of the
/// derived parameters accepted by apply_override.
struct Variant {
  std::string label;
  nlohmann::json set = nlohmann::json::object();
};

struct SweepSpec {
  std::string parameter;
  std::vector<nlohmann::json> values;
  std::vector<Variant> series;  // at least one; empty label for a plain sweep
  int repetitions = 1;
};

struct RunConfig {
  std::string name = "run";
  SolverSelection solver = SolverSelection::all;
  std::uint64_t seed = 1;
  std::optional<VesicleSpec> vesicle;
  std::optional<PopulationDistributions> population;
  KineticConstants kinetics;
  Environment environment;
  LightSignal light;
  FdmConfig fdm;
  AnalyticConfig analytic;
  EnsembleConfig ensemble;
  std::vector<Variant> variants;
  std::optional<SweepSpec> sweep;
  // Cycle types every single-vesicle trajectory must show, e.g. {"b","a"}.
  std::vector<std::string> expected_cycle_types;

  void validate() const;
};

RunConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);

/// FNV-1a of the canonical JSON text, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Returns a copy of cfg with `path` set to `value`. Besides plain paths,
/// accepts:
///   light.duration         single window from the first t_on, same dark tail
///   vesicle.pump_ratio     n_P / n_Sym at fixed n_P + n_Sym (number or "a/b")
///   population.d_mean      mean d_in, by shifting l_ves
///   population.g_l_mean    10^mean of log10 g_L, shifting the truncation too
RunConfig apply_override(const RunConfig& cfg, const std::string& path, const nlohmann::json& value);
RunConfig apply_variant(const RunConfig& cfg, const Variant& v);

}  // namespace vtx
