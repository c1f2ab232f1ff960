// Command-line front end: run / sweep / presets list / emit-plot-data.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vtx/config.hpp"
#include "vtx/errors.hpp"
#include "vtx/presets.hpp"
#include "vtx/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;

struct RunArgs {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
  int workers = 1;
  std::string solver;
};

void add_run_options(CLI::App* cmd, RunArgs& a) {
  auto* cfg = cmd->add_option("--config", a.config, "JSON run configuration");
  auto* pre = cmd->add_option("--preset", a.preset, "built-in scenario (see `presets list`)");
  cfg->excludes(pre);
  cmd->add_option("--seed", a.seed, "RNG seed (u64)");
  cmd->add_option("--out", a.out, "output directory (default: $VTX_OUTPUT_ROOT or ./runs, plus the run name)");
  cmd->add_option("--workers", a.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--solver", a.solver, "fdm, exact, closed or all")
      ->check(CLI::IsMember({"fdm", "exact", "closed", "all"}));
}

vtx::RunConfig resolve(const RunArgs& a) {
  if (a.config.empty() && a.preset.empty()) throw vtx::ValidationError("config", "give --config PATH or --preset NAME");
  vtx::RunConfig cfg = a.preset.empty() ? vtx::load_config(a.config) : vtx::preset(a.preset);
  if (a.seed) cfg.seed = *a.seed;
  if (!a.solver.empty()) cfg.solver = vtx::parse_solver(a.solver, "--solver");
  cfg.validate();
  return cfg;
}

std::filesystem::path out_dir(const RunArgs& a, const vtx::RunConfig& cfg) {
  return a.out.empty() ? vtx::output_root() / cfg.name : std::filesystem::path(a.out);
}

int report(const vtx::ScenarioOutcome& out) {
  std::cout << "wrote " << out.dir.string() << " (config " << out.manifest.at("config_hash").get<std::string>()
            << ")\n";
  for (const auto& e : out.errors) std::cerr << "solver error: " << e << '\n';
  if (!out.self_check_passed) {
    std::cerr << "self-check failed: cycle types differ from the expected sequence, see manifest.json\n";
  }
  return out.errors.empty() && out.self_check_passed ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light-driven vesicle release simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "simulate one scenario and write its artifacts");
  add_run_options(run, run_args);

  RunArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "evaluate a parameter sweep into summary.csv");
  add_run_options(sweep, sweep_args);

  auto* presets = app.add_subcommand("presets", "built-in scenarios");
  presets->require_subcommand(1);
  auto* presets_list = presets->add_subcommand("list", "list preset names");

  std::string plot_dir;
  auto* plot = app.add_subcommand("emit-plot-data", "write long-format plot files for a run directory");
  plot->add_option("run_dir", plot_dir, "run directory holding manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (run->parsed()) {
      const auto cfg = resolve(run_args);
      if (cfg.sweep) throw vtx::ValidationError("sweep", "config '" + cfg.name + "' is a sweep; use `vtx sweep`");
      return report(vtx::run_scenario(cfg, out_dir(run_args, cfg), run_args.workers));
    }
    if (sweep->parsed()) {
      const auto cfg = resolve(sweep_args);
      return report(vtx::run_sweep(cfg, out_dir(sweep_args, cfg), sweep_args.workers));
    }
    if (presets_list->parsed()) {
      for (const auto& p : vtx::list_presets()) {
        std::cout << std::left << std::setw(7) << p.name << std::setw(9) << (p.is_sweep ? "[sweep]" : "[run]")
                  << p.description << '\n';
      }
      return kExitOk;
    }
    if (plot->parsed()) {
      for (const auto& f : vtx::emit_plot_data(plot_dir)) std::cout << f.string() << '\n';
      return kExitOk;
    }
  } catch (const vtx::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const vtx::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}
