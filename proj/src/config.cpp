#include "vtx/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>

#include "vtx/errors.hpp"
#include "vtx/units.hpp"

namespace vtx {

namespace {

using nlohmann::json;
using units::Dimension;

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

void check_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "expected an object");
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& path) {
  check_object(j, path);
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) throw ValidationError(join(path, key), "unknown key");
  }
}

// Reads a unit-annotated quantity into `out` when the key is present.
void read_quantity(const json& j, const char* key, Dimension d, const std::string& path, double& out) {
  if (!j.contains(key)) return;
  const auto field = join(path, key);
  const auto& v = j.at(key);
  if (v.is_string()) {
    out = units::parse(v.get<std::string>(), d, field);
  } else if (v.is_number() && d == Dimension::dimensionless) {
    out = v.get<double>();
  } else if (v.is_number()) {
    throw ValidationError(field, "physical quantity needs a unit, e.g. \"" + units::to_text(v.get<double>()) + " " +
                                     std::string(units::si_symbol(d)) + "\"");
  } else {
    throw ValidationError(field, "expected a quantity string");
  }
}

void read_number(const json& j, const char* key, const std::string& path, double& out) {
  read_quantity(j, key, Dimension::dimensionless, path, out);
}

template <class Int>
void read_integer(const json& j, const char* key, const std::string& path, Int& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ValidationError(join(path, key), "expected an integer");
  if constexpr (std::is_unsigned_v<Int>) {
    if (v.is_number_unsigned()) {
      out = v.get<Int>();
    } else if (v.get<long long>() >= 0) {
      out = static_cast<Int>(v.get<long long>());
    } else {
      throw ValidationError(join(path, key), "must be >= 0");
    }
  } else {
    out = v.get<Int>();
  }
}

json quantity(double si, Dimension d) { return units::format(si, d); }

VesicleSpec parse_vesicle(const json& j, const std::string& path) {
  check_keys(j, {"d_in", "d_mem", "n_pumps", "n_symporters", "permeability", "mode"}, path);
  VesicleSpec v;
  read_quantity(j, "d_in", Dimension::length, path, v.d_in);
  read_quantity(j, "d_mem", Dimension::length, path, v.d_mem);
  read_number(j, "n_pumps", path, v.n_pumps);
  read_number(j, "n_symporters", path, v.n_symporters);
  read_quantity(j, "permeability", Dimension::velocity, path, v.permeability);
  if (j.contains("mode")) {
    const auto m = j.at("mode").is_string() ? j.at("mode").get<std::string>() : std::string{};
    if (m == "symporter") {
      v.mode = TransporterMode::symporter;
    } else if (m == "antiporter") {
      v.mode = TransporterMode::antiporter;
    } else {
      throw ValidationError(join(path, "mode"), "expected \"symporter\" or \"antiporter\"");
    }
  }
  v.validate();
  return v;
}

json vesicle_json(const VesicleSpec& v) {
  return {{"d_in", quantity(v.d_in, Dimension::length)},
          {"d_mem", quantity(v.d_mem, Dimension::length)},
          {"n_pumps", v.n_pumps},
          {"n_symporters", v.n_symporters},
          {"permeability", quantity(v.permeability, Dimension::velocity)},
          {"mode", v.mode == TransporterMode::symporter ? "symporter" : "antiporter"}};
}

PopulationDistributions parse_population(const json& j, const std::string& path) {
  check_keys(j,
             {"l_ves", "mu_ves", "sigma_ves", "d_mem", "protein_density", "p_pump", "mu_l", "sigma_l", "lower_l",
              "upper_l"},
             path);
  PopulationDistributions p;
  read_quantity(j, "l_ves", Dimension::length, path, p.l_ves);
  if (j.contains("mu_ves")) {
    if (!j.at("mu_ves").is_string()) throw ValidationError(join(path, "mu_ves"), "expected e.g. \"4.16 ln(nm)\"");
    p.mu_ves = units::parse_log_length(j.at("mu_ves").get<std::string>(), join(path, "mu_ves"));
  }
  read_number(j, "sigma_ves", path, p.sigma_ves);
  read_quantity(j, "d_mem", Dimension::length, path, p.d_mem);
  read_quantity(j, "protein_density", Dimension::area_density, path, p.protein_density);
  read_number(j, "p_pump", path, p.p_pump);
  read_number(j, "mu_l", path, p.mu_l);
  read_number(j, "sigma_l", path, p.sigma_l);
  read_number(j, "lower_l", path, p.lower_l);
  read_number(j, "upper_l", path, p.upper_l);
  p.validate();
  return p;
}

json population_json(const PopulationDistributions& p) {
  return {{"l_ves", quantity(p.l_ves, Dimension::length)},
          {"mu_ves", units::format_log_length(p.mu_ves)},
          {"sigma_ves", p.sigma_ves},
          {"d_mem", quantity(p.d_mem, Dimension::length)},
          {"protein_density", quantity(p.protein_density, Dimension::area_density)},
          {"p_pump", p.p_pump},
          {"mu_l", p.mu_l},
          {"sigma_l", p.sigma_l},
          {"lower_l", p.lower_l},
          {"upper_l", p.upper_l}};
}

KineticConstants parse_kinetics(const json& j, const std::string& path) {
  check_keys(j, {"pump_rate", "symport_rate", "stoichiometry", "michaelis_constant", "threshold", "avogadro"}, path);
  KineticConstants k;
  read_quantity(j, "pump_rate", Dimension::rate, path, k.pump_rate);
  read_quantity(j, "symport_rate", Dimension::rate, path, k.symport_rate);
  read_number(j, "stoichiometry", path, k.stoichiometry);
  read_quantity(j, "michaelis_constant", Dimension::concentration, path, k.michaelis_constant);
  read_number(j, "threshold", path, k.threshold);
  read_number(j, "avogadro", path, k.avogadro);
  k.validate();
  return k;
}

json kinetics_json(const KineticConstants& k) {
  return {{"pump_rate", quantity(k.pump_rate, Dimension::rate)},
          {"symport_rate", quantity(k.symport_rate, Dimension::rate)},
          {"stoichiometry", k.stoichiometry},
          {"michaelis_constant", quantity(k.michaelis_constant, Dimension::concentration)},
          {"threshold", k.threshold},
          {"avogadro", k.avogadro}};
}

Environment parse_environment(const json& j, const std::string& path) {
  check_keys(j, {"v_out", "buffer_molarity", "dissociation", "c_h_in0", "c_h_out0", "c_s_in0"}, path);
  Environment e;
  read_quantity(j, "v_out", Dimension::volume, path, e.v_out);
  read_quantity(j, "buffer_molarity", Dimension::concentration, path, e.buffer_molarity);
  read_quantity(j, "dissociation", Dimension::concentration, path, e.dissociation);
  read_quantity(j, "c_h_in0", Dimension::concentration, path, e.c_h_in0);
  read_quantity(j, "c_h_out0", Dimension::concentration, path, e.c_h_out0);
  read_quantity(j, "c_s_in0", Dimension::concentration, path, e.c_s_in0);
  return e;
}

json environment_json(const Environment& e) {
  return {{"v_out", quantity(e.v_out, Dimension::volume)},
          {"buffer_molarity", quantity(e.buffer_molarity, Dimension::concentration)},
          {"dissociation", quantity(e.dissociation, Dimension::concentration)},
          {"c_h_in0", quantity(e.c_h_in0, Dimension::concentration)},
          {"c_h_out0", quantity(e.c_h_out0, Dimension::concentration)},
          {"c_s_in0", quantity(e.c_s_in0, Dimension::concentration)}};
}

double parse_time(const json& v, const std::string& field) {
  if (!v.is_string()) throw ValidationError(field, "expected a time such as \"10 s\"");
  return units::parse(v.get<std::string>(), Dimension::time, field);
}

LightSignal parse_light(const json& j, const std::string& path) {
  check_keys(j, {"windows", "periodic", "horizon"}, path);
  LightSignal s;
  if (!j.contains("horizon")) throw ValidationError(join(path, "horizon"), "required");
  s.horizon = parse_time(j.at("horizon"), join(path, "horizon"));
  if (j.contains("windows") && j.contains("periodic")) {
    throw ValidationError(path, "give either windows or periodic, not both");
  }
  if (j.contains("windows")) {
    const auto& w = j.at("windows");
    if (!w.is_array()) throw ValidationError(join(path, "windows"), "expected an array of [t_on, t_off]");
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto field = join(path, "windows[" + std::to_string(i) + "]");
      if (!w[i].is_array() || w[i].size() != 2) throw ValidationError(field, "expected [t_on, t_off]");
      s.windows.push_back({parse_time(w[i][0], field), parse_time(w[i][1], field)});
    }
  }
  if (j.contains("periodic")) {
    const auto& p = j.at("periodic");
    const auto ppath = join(path, "periodic");
    check_keys(p, {"start", "on", "off"}, ppath);
    double start = 0;
    double on = 0;
    double off = 0;
    read_quantity(p, "start", Dimension::time, ppath, start);
    read_quantity(p, "on", Dimension::time, ppath, on);
    read_quantity(p, "off", Dimension::time, ppath, off);
    if (!(on > 0)) throw ValidationError(join(ppath, "on"), "must be > 0");
    if (!(off >= 0)) throw ValidationError(join(ppath, "off"), "must be >= 0");
    for (long n = 0;; ++n) {
      const double t_on = start + static_cast<double>(n) * (on + off);
      if (t_on + on > s.horizon) break;
      s.windows.push_back({t_on, t_on + on});
    }
  }
  s.validate();
  return s;
}

json light_json(const LightSignal& s) {
  json windows = json::array();
  for (const auto& w : s.windows) {
    windows.push_back({quantity(w.t_on, Dimension::time), quantity(w.t_off, Dimension::time)});
  }
  return {{"windows", windows}, {"horizon", quantity(s.horizon, Dimension::time)}};
}

FdmConfig parse_fdm(const json& j, const std::string& path) {
  check_keys(j, {"dt", "record_stride", "substeps", "stiffness_target", "depletion_fraction"}, path);
  FdmConfig f;
  read_quantity(j, "dt", Dimension::time, path, f.dt);
  read_integer(j, "record_stride", path, f.record_stride);
  read_integer(j, "substeps", path, f.substeps);
  read_number(j, "stiffness_target", path, f.stiffness_target);
  read_number(j, "depletion_fraction", path, f.depletion_fraction);
  f.validate();
  return f;
}

json fdm_json(const FdmConfig& f) {
  return {{"dt", quantity(f.dt, Dimension::time)},
          {"record_stride", f.record_stride},
          {"substeps", f.substeps},
          {"stiffness_target", f.stiffness_target},
          {"depletion_fraction", f.depletion_fraction}};
}

AnalyticConfig parse_analytic(const json& j, const std::string& path) {
  check_keys(j, {"dt_out", "depletion_fraction"}, path);
  AnalyticConfig a;
  read_quantity(j, "dt_out", Dimension::time, path, a.dt_out);
  read_number(j, "depletion_fraction", path, a.depletion_fraction);
  a.validate();
  return a;
}

json analytic_json(const AnalyticConfig& a) {
  return {{"dt_out", quantity(a.dt_out, Dimension::time)}, {"depletion_fraction", a.depletion_fraction}};
}

EnsembleConfig parse_ensemble(const json& j, const std::string& path) {
  check_keys(j, {"n_ves", "n_mod", "n_ex", "v_out_tot", "dt_out"}, path);
  EnsembleConfig e;
  read_number(j, "n_ves", path, e.n_ves);
  read_integer(j, "n_mod", path, e.n_mod);
  read_integer(j, "n_ex", path, e.n_ex);
  read_quantity(j, "v_out_tot", Dimension::volume, path, e.v_out_tot);
  read_quantity(j, "dt_out", Dimension::time, path, e.dt_out);
  return e;
}

json ensemble_json(const EnsembleConfig& e) {
  return {{"n_ves", e.n_ves},
          {"n_mod", e.n_mod},
          {"n_ex", e.n_ex},
          {"v_out_tot", quantity(e.v_out_tot, Dimension::volume)},
          {"dt_out", quantity(e.dt_out, Dimension::time)}};
}

Variant parse_variant(const json& j, const std::string& path) {
  check_keys(j, {"label", "set"}, path);
  Variant v;
  if (j.contains("label")) {
    if (!j.at("label").is_string()) throw ValidationError(join(path, "label"), "expected a string");
    v.label = j.at("label").get<std::string>();
  }
  if (j.contains("set")) {
    check_object(j.at("set"), join(path, "set"));
    v.set = j.at("set");
  }
  return v;
}

json variant_json(const Variant& v) { return {{"label", v.label}, {"set", v.set}}; }

std::vector<Variant> parse_variants(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array");
  std::vector<Variant> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_variant(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

SweepSpec parse_sweep(const json& j, const std::string& path) {
  check_keys(j, {"parameter", "values", "series", "repetitions"}, path);
  SweepSpec s;
  if (!j.contains("parameter") || !j.at("parameter").is_string()) {
    throw ValidationError(join(path, "parameter"), "required string");
  }
  s.parameter = j.at("parameter").get<std::string>();
  if (!j.contains("values") || !j.at("values").is_array() || j.at("values").empty()) {
    throw ValidationError(join(path, "values"), "required non-empty array");
  }
  for (const auto& v : j.at("values")) s.values.push_back(v);
  if (j.contains("series")) s.series = parse_variants(j.at("series"), join(path, "series"));
  if (s.series.empty()) s.series.push_back({});
  read_integer(j, "repetitions", path, s.repetitions);
  if (s.repetitions < 1) throw ValidationError(join(path, "repetitions"), "must be >= 1");
  return s;
}

json sweep_json(const SweepSpec& s) {
  json series = json::array();
  for (const auto& v : s.series) series.push_back(variant_json(v));
  return {{"parameter", s.parameter}, {"values", s.values}, {"series", series}, {"repetitions", s.repetitions}};
}

double parse_ratio(const json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw ValidationError(field, "expected a number or \"a/b\"");
  const auto text = v.get<std::string>();
  const auto slash = text.find('/');
  if (slash == std::string::npos) return units::parse(text, Dimension::dimensionless, field);
  const double num = units::parse(text.substr(0, slash), Dimension::dimensionless, field);
  const double den = units::parse(text.substr(slash + 1), Dimension::dimensionless, field);
  if (!(den > 0)) throw ValidationError(field, "denominator must be > 0");
  return num / den;
}

}  // namespace

SolverSelection parse_solver(std::string_view text, const std::string& field) {
  if (text == "fdm") return SolverSelection::fdm;
  if (text == "exact") return SolverSelection::exact;
  if (text == "closed") return SolverSelection::closed;
  if (text == "all") return SolverSelection::all;
  throw ValidationError(field, "expected one of fdm, exact, closed, all; got '" + std::string(text) + "'");
}

std::string_view to_string(SolverSelection s) {
  switch (s) {
    case SolverSelection::fdm: return "fdm";
    case SolverSelection::exact: return "exact";
    case SolverSelection::closed: return "closed";
    case SolverSelection::all: return "all";
  }
  return "?";
}

void RunConfig::validate() const {
  if (vesicle.has_value() == population.has_value()) {
    throw ValidationError("vesicle", "exactly one of 'vesicle' and 'population' must be given");
  }
  if (name.empty() || name.find('/') != std::string::npos) {
    throw ValidationError("name", "must be a non-empty file name");
  }
  kinetics.validate();
  light.validate();
  if (vesicle) {
    vesicle->validate();
    (void)environment.validate(*vesicle);
    fdm.validate();
    analytic.validate();
  } else {
    population->validate();
    EnsembleConfig e = ensemble;
    e.solver = EnsembleSolver::fdm;
    e.fdm = fdm;
    e.validate();
  }
  for (const auto& t : expected_cycle_types) {
    if (t != "a" && t != "b" && t != "c") throw ValidationError("expected_cycle_types", "entries must be a, b or c");
  }
  if (sweep && !variants.empty()) throw ValidationError("variants", "a sweep config cannot also list variants");
}

RunConfig parse_config(const json& j) {
  check_keys(j,
             {"name", "solver", "seed", "vesicle", "population", "kinetics", "environment", "light", "fdm", "analytic",
              "ensemble", "variants", "sweep", "expected_cycle_types"},
             "");
  RunConfig c;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ValidationError("name", "expected a string");
    c.name = j.at("name").get<std::string>();
  }
  if (j.contains("solver")) {
    if (!j.at("solver").is_string()) throw ValidationError("solver", "expected a string");
    c.solver = parse_solver(j.at("solver").get<std::string>());
  }
  read_integer(j, "seed", "", c.seed);
  if (j.contains("vesicle")) c.vesicle = parse_vesicle(j.at("vesicle"), "vesicle");
  if (j.contains("population")) c.population = parse_population(j.at("population"), "population");
  if (j.contains("kinetics")) c.kinetics = parse_kinetics(j.at("kinetics"), "kinetics");
  if (j.contains("environment")) c.environment = parse_environment(j.at("environment"), "environment");
  if (!j.contains("light")) throw ValidationError("light", "required");
  c.light = parse_light(j.at("light"), "light");
  if (j.contains("fdm")) c.fdm = parse_fdm(j.at("fdm"), "fdm");
  if (j.contains("analytic")) c.analytic = parse_analytic(j.at("analytic"), "analytic");
  if (j.contains("ensemble")) c.ensemble = parse_ensemble(j.at("ensemble"), "ensemble");
  if (j.contains("variants")) c.variants = parse_variants(j.at("variants"), "variants");
  if (j.contains("sweep")) c.sweep = parse_sweep(j.at("sweep"), "sweep");
  if (j.contains("expected_cycle_types")) {
    const auto& t = j.at("expected_cycle_types");
    if (!t.is_array()) throw ValidationError("expected_cycle_types", "expected an array");
    for (const auto& e : t) {
      if (!e.is_string()) throw ValidationError("expected_cycle_types", "entries must be strings");
      c.expected_cycle_types.push_back(e.get<std::string>());
    }
  }
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  json j = {{"name", c.name},
            {"solver", std::string(to_string(c.solver))},
            {"seed", c.seed},
            {"kinetics", kinetics_json(c.kinetics)},
            {"environment", environment_json(c.environment)},
            {"light", light_json(c.light)},
            {"fdm", fdm_json(c.fdm)},
            {"analytic", analytic_json(c.analytic)},
            {"ensemble", ensemble_json(c.ensemble)}};
  if (c.vesicle) j["vesicle"] = vesicle_json(*c.vesicle);
  if (c.population) j["population"] = population_json(*c.population);
  if (!c.variants.empty()) {
    j["variants"] = json::array();
    for (const auto& v : c.variants) j["variants"].push_back(variant_json(v));
  }
  if (c.sweep) j["sweep"] = sweep_json(*c.sweep);
  if (!c.expected_cycle_types.empty()) j["expected_cycle_types"] = c.expected_cycle_types;
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config", path.string() + ": " + e.what());
  }
  return parse_config(j);
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig apply_override(const RunConfig& cfg, const std::string& path, const json& value) {
  RunConfig out = cfg;
  if (path == "light.duration") {
    if (cfg.light.windows.empty()) throw ValidationError(path, "base signal has no window to resize");
    const double d = parse_time(value, path);
    const auto& w = cfg.light.windows.front();
    const double tail = cfg.light.horizon - w.t_off;
    out.light.windows = {{w.t_on, w.t_on + d}};
    out.light.horizon = w.t_on + d + tail;
    out.light.validate();
    return out;
  }
  if (path == "vesicle.pump_ratio") {
    if (!out.vesicle) throw ValidationError(path, "config has no vesicle block");
    const double r = parse_ratio(value, path);
    if (!(r > 0)) throw ValidationError(path, "must be > 0");
    const double n_tot = out.vesicle->n_pumps + out.vesicle->n_symporters;
    out.vesicle->n_pumps = std::round(n_tot * r / (1.0 + r));
    out.vesicle->n_symporters = n_tot - out.vesicle->n_pumps;
    return out;
  }
  if (path == "population.d_mean") {
    if (!out.population) throw ValidationError(path, "config has no population block");
    auto& p = *out.population;
    const double d = value.is_string() ? units::parse(value.get<std::string>(), Dimension::length, path) : -1.0;
    p.l_ves = d - std::exp(p.mu_ves + 0.5 * p.sigma_ves * p.sigma_ves);
    if (!(p.l_ves >= 0)) throw ValidationError(path, "mean diameter smaller than the log-normal part alone");
    return out;
  }
  if (path == "population.g_l_mean") {
    if (!out.population) throw ValidationError(path, "config has no population block");
    auto& p = *out.population;
    const double g = value.is_string() ? units::parse(value.get<std::string>(), Dimension::velocity, path) : -1.0;
    if (!(g > 0)) throw ValidationError(path, "expected a positive velocity such as \"5e-6 m/s\"");
    const double shift = std::log10(g) - p.mu_l;
    p.mu_l += shift;
    p.lower_l += shift;
    p.upper_l += shift;
    return out;
  }

  json j = to_json(cfg);
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const auto key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ValidationError(path, "malformed parameter path");
    if (dot == std::string::npos) {
      if (!node->is_object() || !node->contains(key)) throw ValidationError(path, "unknown parameter");
      (*node)[key] = value;
      break;
    }
    if (!node->is_object() || !node->contains(key)) throw ValidationError(path, "unknown parameter");
    node = &(*node)[key];
    start = dot + 1;
  }
  return parse_config(j);
}

RunConfig apply_variant(const RunConfig& cfg, const Variant& v) {
  RunConfig out = cfg;
  for (const auto& [path, value] : v.set.items()) out = apply_override(out, path, value);
  return out;
}

}  // namespace vtx
