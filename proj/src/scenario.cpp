#include "vtx/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "vtx/analytic.hpp"
#include "vtx/errors.hpp"
#include "vtx/fdm.hpp"
#include "vtx/parallel.hpp"
#include "vtx/units.hpp"

namespace vtx {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string slug(const std::string& label) {
  std::string out;
  for (char ch : label) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '.' ||
                      ch == '-';
    out += keep ? ch : '_';
  }
  return out.empty() ? "base" : out;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

void write_text(const fs::path& p, const std::string& text) {
  auto os = open_out(p);
  os << text;
}

std::string num(double v) { return units::to_text(v); }

// JSON cannot hold NaN/inf; those become null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json schedule_json(const CycleSchedule& s) {
  json cycles = json::array();
  for (const auto& c : s.cycles) {
    cycles.push_back({{"t1", c.t1},
                      {"t2", c.t2},
                      {"t3", c.t3},
                      {"t4", finite_or_null(c.t4)},
                      {"type", std::string(to_string(c.type))}});
  }
  return cycles;
}

json depletion_json(const std::vector<DepletionEvent>& d) {
  json out = json::array();
  for (const auto& e : d) out.push_back({{"t", e.t}, {"c_s_in", e.c_s_in}});
  return out;
}

std::vector<std::string> type_sequence(const Trajectory& traj) {
  std::vector<std::string> out;
  for (const auto& c : traj.schedule.cycles) out.emplace_back(to_string(c.type));
  return out;
}

void write_light_csv(const fs::path& p, const LightSignal& s) {
  auto os = open_out(p);
  os << "t,light\n";
  os << "0," << (s.is_on(0.0) ? 1 : 0) << '\n';
  for (const auto& w : s.windows) {
    os << num(w.t_on) << ",0\n" << num(w.t_on) << ",1\n" << num(w.t_off) << ",1\n" << num(w.t_off) << ",0\n";
  }
  os << num(s.horizon) << ',' << (s.is_on(s.horizon) ? 1 : 0) << '\n';
}

void write_ensemble_csv(const fs::path& summary, const fs::path& experiments, const EnsembleResult& r) {
  {
    auto os = open_out(summary);
    os << "t,inter_mean_C_S_out,inter_var_C_S_out,inter_mean_C_H_in,inter_var_C_H_in,reference_C_H_in,"
          "reference_C_S_out\n";
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      os << num(r.t[i]) << ',' << num(r.inter_mean_c_s_out[i]) << ','
         << (r.inter_var_c_s_out.empty() ? "nan" : num(r.inter_var_c_s_out[i])) << ','
         << num(r.inter_mean_c_h_in[i]) << ',' << (r.inter_var_c_h_in.empty() ? "nan" : num(r.inter_var_c_h_in[i]))
         << ',' << num(r.reference.samples[i].c_h_in) << ',' << num(r.reference.samples[i].c_s_out) << '\n';
    }
  }
  auto os = open_out(experiments);
  os << "experiment,t,mean_C_H_in,std_C_H_in,mean_C_S_out,std_C_S_out\n";
  for (std::size_t e = 0; e < r.experiments.size(); ++e) {
    const auto& x = r.experiments[e];
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      os << e << ',' << num(r.t[i]) << ',' << num(x.mean_c_h_in[i]) << ',' << num(x.std_c_h_in[i]) << ','
         << num(x.mean_c_s_out[i]) << ',' << num(x.std_c_s_out[i]) << '\n';
    }
  }
}

EnsembleSolver ensemble_solver(SolverSelection s) {
  switch (s) {
    case SolverSelection::exact: return EnsembleSolver::exact;
    case SolverSelection::fdm: return EnsembleSolver::fdm;
    default: return EnsembleSolver::closed;
  }
}

double value_at(const std::vector<double>& t, const std::vector<double>& v, double when) {
  const auto it = std::lower_bound(t.begin(), t.end(), when - 1e-9);
  if (it == t.end()) return v.back();
  return v[static_cast<std::size_t>(it - t.begin())];
}

double min_illumination_time(const VesicleSpec& v, const RunConfig& cfg) {
  const auto r = derive_rates(v, cfg.kinetics, cfg.environment);
  const auto c = phase_coefficients(r, cfg.environment, true, false, cfg.environment.c_h_in0);
  const auto t = predict_symport_time(cfg.environment.c_h_in0, r.c_switch, c.a(), c.b(), 0.0);
  return t ? *t : kNaN;
}

void fill_trajectory_metrics(SweepRow& row, const Trajectory& traj, const LightSignal& light) {
  row.symport_start = row.symport_end = kNaN;
  row.symport_duration = 0;
  if (!traj.schedule.cycles.empty()) {
    const auto& c = traj.schedule.cycles.front();
    if (c.type != CycleType::b) {
      row.symport_start = c.t2;
      row.symport_end = c.t4;
      row.symport_duration = c.t4 - c.t2;
    }
  }
  row.peak_c_h_in = 0;
  std::vector<double> t;
  std::vector<double> s_out;
  for (const auto& s : traj.samples) {
    row.peak_c_h_in = std::max(row.peak_c_h_in, s.c_h_in);
    t.push_back(s.t);
    s_out.push_back(s.c_s_out);
  }
  row.terminal_c_s_out = s_out.back();
  row.c_s_out_light_off = light.windows.empty() ? kNaN : value_at(t, s_out, light.windows.front().t_off);
  row.depletion_time = traj.depletion.empty() ? kNaN : traj.depletion.front().t;
  row.terminal_var_c_s_out = kNaN;
}

void fill_ensemble_metrics(SweepRow& row, const EnsembleResult& r, const LightSignal& light) {
  row.peak_c_h_in = *std::max_element(r.inter_mean_c_h_in.begin(), r.inter_mean_c_h_in.end());
  double start = 0;
  double end = 0;
  for (const auto& e : r.experiments) {
    start += e.median_symport_start;
    end += e.median_symport_end;
  }
  row.symport_start = start / static_cast<double>(r.experiments.size());
  row.symport_end = end / static_cast<double>(r.experiments.size());
  row.symport_duration = std::isfinite(row.symport_end - row.symport_start) ? row.symport_end - row.symport_start : 0;
  row.terminal_c_s_out = r.inter_mean_c_s_out.back();
  row.c_s_out_light_off =
      light.windows.empty() ? kNaN : value_at(r.t, r.inter_mean_c_s_out, light.windows.front().t_off);
  row.depletion_time = kNaN;
  row.terminal_var_c_s_out = r.inter_var_c_s_out.empty() ? kNaN : r.inter_var_c_s_out.back();
}

// Minimal reader for the CSV files this module writes.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name, const fs::path& file) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error(file.string() + ": missing column " + name);
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Table read_table(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  Table t;
  std::string line;
  if (std::getline(in, line)) t.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty()) t.rows.push_back(split(line));
  }
  return t;
}

class LongWriter {
 public:
  LongWriter(fs::path p, const char* x_name) : path_(std::move(p)), os_(open_out(path_)) {
    os_ << "series," << x_name << ",value\n";
  }
  void add(const std::string& series, const std::string& x, const std::string& v) {
    os_ << series << ',' << x << ',' << v << '\n';
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::ofstream os_;
};

}  // namespace

fs::path output_root() {
  if (const char* env = std::getenv(kOutputRootEnv); env != nullptr && *env != '\0') return env;
  return "runs";
}

std::vector<SolverSelection> expand_solvers(SolverSelection s) {
  if (s == SolverSelection::all) return {SolverSelection::fdm, SolverSelection::exact, SolverSelection::closed};
  return {s};
}

Trajectory solve_single(const RunConfig& cfg, SolverSelection solver) {
  if (!cfg.vesicle) throw ValidationError("vesicle", "single-vesicle run needs a vesicle block");
  switch (solver) {
    case SolverSelection::fdm: return simulate_svs(*cfg.vesicle, cfg.kinetics, cfg.environment, cfg.light, cfg.fdm);
    case SolverSelection::exact:
      return run_analytic(*cfg.vesicle, cfg.kinetics, cfg.environment, cfg.light, AnalyticMode::exact, cfg.analytic);
    case SolverSelection::closed:
      return run_analytic(*cfg.vesicle, cfg.kinetics, cfg.environment, cfg.light, AnalyticMode::closed, cfg.analytic);
    case SolverSelection::all: break;
  }
  throw std::invalid_argument("solve_single: pick one solver");
}

EnsembleResult solve_ensemble(const RunConfig& cfg, SolverSelection solver, int workers) {
  if (!cfg.population) throw ValidationError("population", "ensemble run needs a population block");
  EnsembleConfig e = cfg.ensemble;
  e.seed = cfg.seed;
  e.solver = ensemble_solver(solver);
  e.workers = workers;
  e.fdm = cfg.fdm;
  return run_ensemble(*cfg.population, cfg.kinetics, cfg.environment, cfg.light, e);
}

ScenarioOutcome run_scenario(const RunConfig& cfg, const fs::path& dir, int workers) {
  cfg.validate();
  fs::create_directories(dir);
  ScenarioOutcome out;
  out.dir = dir;

  json manifest = {{"name", cfg.name},
                   {"kind", cfg.population ? "ensemble" : "single"},
                   {"seed", cfg.seed},
                   {"config_hash", config_hash(cfg)},
                   {"config", to_json(cfg)}};
  json artifacts = json::array();
  json runs = json::array();
  json errors = json::array();
  json solvers = json::array();
  for (auto s : expand_solvers(cfg.solver)) solvers.push_back(std::string(to_string(s)));
  manifest["solvers"] = solvers;

  write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
  write_light_csv(dir / "light.csv", cfg.light);
  artifacts.push_back({{"file", "light.csv"}, {"kind", "light"}});

  json self_check = nullptr;
  if (!cfg.expected_cycle_types.empty()) {
    self_check = {{"expected", cfg.expected_cycle_types}, {"observed", json::object()}, {"passed", true}};
  }

  std::vector<Variant> variants = cfg.variants;
  if (variants.empty()) variants.push_back({cfg.name, json::object()});

  for (const auto& variant : variants) {
    const RunConfig vcfg = apply_variant(cfg, variant);
    for (auto solver : expand_solvers(cfg.solver)) {
      const std::string solver_name(to_string(solver));
      const std::string stem = slug(variant.label) + "_" + solver_name;
      try {
        if (vcfg.vesicle) {
          const auto traj = solve_single(vcfg, solver);
          const std::string file = stem + ".csv";
          {
            auto os = open_out(dir / file);
            write_csv(os, traj);
          }
          artifacts.push_back({{"file", file}, {"kind", "trajectory"}, {"label", variant.label}, {"solver", solver_name}});
          runs.push_back({{"file", file},
                          {"label", variant.label},
                          {"solver", solver_name},
                          {"c_switch", traj.rates.c_switch},
                          {"schedule", schedule_json(traj.schedule)},
                          {"depletion", depletion_json(traj.depletion)},
                          {"warnings", traj.warnings}});
          if (!self_check.is_null()) {
            const auto observed = type_sequence(traj);
            self_check["observed"][file] = observed;
            if (observed != cfg.expected_cycle_types) {
              self_check["passed"] = false;
              out.self_check_passed = false;
            }
          }
        } else {
          const auto result = solve_ensemble(vcfg, solver, workers);
          const std::string file = "ensemble_" + stem + ".csv";
          const std::string xfile = "ensemble_" + stem + "_experiments.csv";
          write_ensemble_csv(dir / file, dir / xfile, result);
          artifacts.push_back({{"file", file}, {"kind", "ensemble"}, {"label", variant.label}, {"solver", solver_name}});
          artifacts.push_back(
              {{"file", xfile}, {"kind", "ensemble_experiments"}, {"label", variant.label}, {"solver", solver_name}});
          runs.push_back({{"file", file},
                          {"label", variant.label},
                          {"solver", solver_name},
                          {"reference_schedule", schedule_json(result.reference.schedule)},
                          {"warnings", result.reference.warnings}});
        }
      } catch (const SolverError& e) {
        const std::string msg = variant.label + "/" + solver_name + ": " + e.what();
        errors.push_back(msg);
        out.errors.push_back(msg);
      }
    }
  }
  manifest["artifacts"] = artifacts;
  manifest["runs"] = runs;
  manifest["errors"] = errors;
  if (!self_check.is_null()) manifest["self_check"] = self_check;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  out.manifest = std::move(manifest);
  return out;
}

std::vector<SweepRow> compute_sweep(const RunConfig& cfg, int workers) {
  cfg.validate();
  if (!cfg.sweep) throw ValidationError("sweep", "config has no sweep block");
  const auto& sw = *cfg.sweep;
  RunConfig base = cfg;
  base.sweep.reset();

  struct Point {
    const Variant* series;
    const json* value;
    int rep;
  };
  std::vector<Point> points;
  for (const auto& s : sw.series) {
    for (const auto& v : sw.values) {
      for (int rep = 0; rep < sw.repetitions; ++rep) points.push_back({&s, &v, rep});
    }
  }
  const auto solvers = expand_solvers(cfg.solver);
  std::vector<std::vector<SweepRow>> rows(points.size());

  parallel_for(static_cast<int>(points.size()), workers, [&](int i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    SweepRow proto;
    proto.series = p.series->label;
    proto.value = p.value->is_string() ? p.value->get<std::string>() : p.value->dump();
    proto.value_si = p.value->is_string() ? units::parse_any(proto.value, sw.parameter) : p.value->get<double>();
    proto.repetition = p.rep;
    RunConfig pcfg;
    try {
      pcfg = apply_override(apply_variant(base, *p.series), sw.parameter, *p.value);
      pcfg.validate();
    } catch (const ValidationError& e) {
      for (auto solver : solvers) {
        SweepRow row = proto;
        row.solver = std::string(to_string(solver));
        row.status = "invalid";
        row.error = e.what();
        rows[static_cast<std::size_t>(i)].push_back(std::move(row));
      }
      return;
    }
    pcfg.seed = cfg.seed + static_cast<std::uint64_t>(p.rep);
    const VesicleSpec ref_vesicle = pcfg.vesicle ? *pcfg.vesicle : mean_parameter_vesicle(*pcfg.population);
    proto.min_illumination = min_illumination_time(ref_vesicle, pcfg);
    for (auto solver : solvers) {
      SweepRow row = proto;
      row.solver = std::string(to_string(solver));
      try {
        if (pcfg.vesicle) {
          fill_trajectory_metrics(row, solve_single(pcfg, solver), pcfg.light);
        } else {
          fill_ensemble_metrics(row, solve_ensemble(pcfg, solver, 1), pcfg.light);
        }
      } catch (const SolverError& e) {
        row.status = "solver_error";
        row.error = e.what();
      }
      rows[static_cast<std::size_t>(i)].push_back(std::move(row));
    }
  });

  std::vector<SweepRow> out;
  for (auto& r : rows) {
    for (auto& row : r) out.push_back(std::move(row));
  }
  return out;
}

ScenarioOutcome run_sweep(const RunConfig& cfg, const fs::path& dir, int workers) {
  const auto rows = compute_sweep(cfg, workers);
  fs::create_directories(dir);
  ScenarioOutcome out;
  out.dir = dir;
  write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
  {
    auto os = open_out(dir / "summary.csv");
    os << "series,parameter,value,value_si,repetition,solver,status,symport_start,symport_end,symport_duration,"
          "min_illumination,peak_C_H_in,C_S_out_light_off,terminal_C_S_out,depletion_time,terminal_var_C_S_out,"
          "error\n";
    for (const auto& r : rows) {
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      os << slug(r.series) << ',' << cfg.sweep->parameter << ',' << slug(r.value) << ',' << num(r.value_si) << ','
         << r.repetition << ',' << r.solver << ',' << r.status << ',' << num(r.symport_start) << ','
         << num(r.symport_end) << ',' << num(r.symport_duration) << ',' << num(r.min_illumination) << ','
         << num(r.peak_c_h_in) << ',' << num(r.c_s_out_light_off) << ',' << num(r.terminal_c_s_out) << ','
         << num(r.depletion_time) << ',' << num(r.terminal_var_c_s_out) << ',' << err << '\n';
    }
  }
  json errors = json::array();
  for (const auto& r : rows) {
    if (r.status != "ok") {
      const std::string msg = r.series + "@" + r.value + "/" + r.solver + ": " + r.error;
      errors.push_back(msg);
      out.errors.push_back(msg);
    }
  }
  json solvers = json::array();
  for (auto s : expand_solvers(cfg.solver)) solvers.push_back(std::string(to_string(s)));
  json manifest = {{"name", cfg.name},
                   {"kind", "sweep"},
                   {"seed", cfg.seed},
                   {"config_hash", config_hash(cfg)},
                   {"config", to_json(cfg)},
                   {"solvers", solvers},
                   {"artifacts", json::array({{{"file", "summary.csv"}, {"kind", "summary"}}})},
                   {"points", rows.size()},
                   {"errors", errors}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  out.manifest = std::move(manifest);
  return out;
}

std::vector<fs::path> emit_plot_data(const fs::path& run_dir) {
  const fs::path manifest_path = run_dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw ValidationError("run_dir", "no manifest.json in " + run_dir.string() + "; nothing to plot");
  }
  json manifest;
  {
    std::ifstream in(manifest_path);
    try {
      manifest = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError("run_dir", manifest_path.string() + ": " + e.what());
    }
  }
  const auto& artifacts = manifest.at("artifacts");
  std::vector<std::string> missing;
  for (const auto& a : artifacts) {
    const auto file = a.at("file").get<std::string>();
    if (!fs::exists(run_dir / file)) missing.push_back(file);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ValidationError("run_dir", "missing artifacts in " + run_dir.string() + ": " + list);
  }

  const fs::path plot = run_dir / "plot";
  fs::create_directories(plot);
  std::map<std::string, std::unique_ptr<LongWriter>> writers;
  auto writer = [&](const std::string& name, const char* x_name = "t") -> LongWriter& {
    auto& w = writers[name];
    if (!w) w = std::make_unique<LongWriter>(plot / (name + ".csv"), x_name);
    return *w;
  };

  for (const auto& a : artifacts) {
    const auto file = a.at("file").get<std::string>();
    const auto kind = a.at("kind").get<std::string>();
    const auto table = read_table(run_dir / file);
    const fs::path src = run_dir / file;
    if (kind == "light") {
      const auto t = table.column("t", src);
      const auto l = table.column("light", src);
      for (const auto& r : table.rows) writer("signal").add("light", r[t], r[l]);
    } else if (kind == "trajectory") {
      const std::string series = a.at("label").get<std::string>() + "/" + a.at("solver").get<std::string>();
      const auto t = table.column("t", src);
      for (const char* q : {"C_H_in", "C_H_out", "C_S_in", "C_S_out"}) {
        const auto c = table.column(q, src);
        auto& w = writer(q);
        for (const auto& r : table.rows) w.add(series, r[t], r[c]);
      }
    } else if (kind == "ensemble") {
      const std::string solver = a.at("solver").get<std::string>();
      const auto t = table.column("t", src);
      for (const char* q : {"C_S_out", "C_H_in"}) {
        const auto m = table.column(std::string("inter_mean_") + q, src);
        const auto v = table.column(std::string("inter_var_") + q, src);
        const auto ref = table.column(std::string("reference_") + q, src);
        auto& w = writer(std::string("ensemble_") + q);
        for (const auto& r : table.rows) {
          const double mean = std::strtod(r[m].c_str(), nullptr);
          const double sd = std::sqrt(std::strtod(r[v].c_str(), nullptr));
          w.add(solver + "/inter_experiment_mean", r[t], r[m]);
          w.add(solver + "/inter_experiment_mean+std", r[t], num(mean + sd));
          w.add(solver + "/inter_experiment_mean-std", r[t], num(mean - sd));
          w.add(solver + "/mean_parameter_svs", r[t], r[ref]);
        }
      }
    } else if (kind == "ensemble_experiments") {
      const std::string solver = a.at("solver").get<std::string>();
      const auto e = table.column("experiment", src);
      const auto t = table.column("t", src);
      for (const char* q : {"C_H_in", "C_S_out"}) {
        const auto m = table.column(std::string("mean_") + q, src);
        const auto sdc = table.column(std::string("std_") + q, src);
        auto& w = writer(std::string("vesicles_") + q);
        for (const auto& r : table.rows) {
          const double mean = std::strtod(r[m].c_str(), nullptr);
          const double sd = std::strtod(r[sdc].c_str(), nullptr);
          const std::string s = solver + "/exp" + r[e];
          w.add(s + "/mean", r[t], r[m]);
          w.add(s + "/mean+std", r[t], num(mean + sd));
          w.add(s + "/mean-std", r[t], num(mean - sd));
        }
      }
    } else if (kind == "summary") {
      const auto series = table.column("series", src);
      const auto solver = table.column("solver", src);
      const auto x = table.column("value_si", src);
      const auto rep = table.column("repetition", src);
      for (const char* metric : {"symport_duration", "symport_start", "symport_end", "min_illumination",
                                 "peak_C_H_in", "C_S_out_light_off", "terminal_C_S_out", "terminal_var_C_S_out"}) {
        const auto c = table.column(metric, src);
        auto& w = writer(std::string("sweep_") + metric, "x");
        for (const auto& r : table.rows) {
          w.add(r[series] + "/" + r[solver] + "/rep" + r[rep], r[x], r[c]);
        }
      }
    }
  }
  std::vector<fs::path> out;
  for (const auto& [_, w] : writers) out.push_back(w->path());
  return out;
}

}  // namespace vtx
