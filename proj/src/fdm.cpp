#include "vtx/fdm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vtx/buffer.hpp"
#include "vtx/errors.hpp"

namespace vtx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Crossing {
  double t;
  bool upward;
};

CycleSchedule build_schedule(const std::vector<Crossing>& crossings, bool initially_above,
                             const LightSignal& signal) {
  auto above_at = [&](double t) {
    bool above = initially_above;
    for (const auto& c : crossings) {
      if (c.t > t) break;
      above = c.upward;
    }
    return above;
  };
  auto first_after = [&](double t, bool upward) {
    for (const auto& c : crossings) {
      if (c.t > t && c.upward == upward) return c.t;
    }
    return kInf;
  };

  CycleSchedule schedule;
  const auto& w = signal.windows;
  for (std::size_t i = 0; i < w.size(); ++i) {
    CycleTimes c;
    c.t1 = w[i].t_on;
    c.t3 = w[i].t_off;
    const double t1_next = i + 1 < w.size() ? w[i + 1].t_on : kInf;
    const double t2_raw = above_at(c.t1) ? c.t1 : first_after(c.t1, true);
    const double t4_raw = t2_raw < c.t3 ? first_after(t2_raw, false) : c.t3;
    const auto clipped = clip_cycle_times(t2_raw, t4_raw, c.t1, c.t3, t1_next);
    c.t2 = clipped.t2;
    c.t4 = clipped.t4;
    schedule.cycles.push_back(c);
  }
  schedule.resolved_until = signal.horizon;
  classify_cycles(schedule);
  return schedule;
}

// Light state for the Euler step [k dt, (k+1) dt), tested at the midpoint so
// window edges on the grid are not subject to rounding of k * dt.
bool light_for_step(const LightSignal& signal, long step, double dt) {
  return signal.is_on((static_cast<double>(step) + 0.5) * dt);
}

struct VesicleCompartment {
  DerivedRates rates;
  double n_h = 0;  // free + complexed, mol
  double n_s = 0;  // mol
  double c_h = 0;  // free, cached after equilibration
  double c_hb = 0;
};

}  // namespace

void FdmConfig::validate() const {
  if (!(dt > 0)) throw ValidationError("fdm.dt", "must be > 0");
  if (record_stride < 1) throw ValidationError("fdm.record_stride", "must be >= 1");
  if (substeps < 0) throw ValidationError("fdm.substeps", "must be >= 0 (0 = automatic)");
  if (!(stiffness_target > 0 && stiffness_target < 1)) {
    throw ValidationError("fdm.stiffness_target", "must lie in (0, 1)");
  }
  if (!(depletion_fraction >= 0 && depletion_fraction < 1)) {
    throw ValidationError("fdm.depletion_fraction", "must lie in [0, 1)");
  }
}

double stiffest_rate(const DerivedRates& r, const Environment& env) {
  double a = r.gamma_leak * (1.0 / r.v_in + 1.0 / r.v_out) + r.gamma_pump / (r.v_out * r.c_h_out0);
  if (env.buffer_molarity > 0) {
    // Buffer capacity dT/dC shrinks as C rises; bound C_H_in from above by
    // twice the pump/leak equilibrium.
    const double c_max = 2.0 * std::max(env.c_h_in0, env.c_h_out0 + r.gamma_pump / r.gamma_leak);
    const double s = c_max + env.dissociation;
    a /= 1.0 + env.dissociation * env.buffer_molarity / (s * s);
  }
  const double a_s = r.gamma_sym_s / (r.v_in * r.michaelis_constant);
  return std::max(a, a_s);
}

int resolve_substeps(const FdmConfig& cfg, double a_stiff) {
  if (cfg.substeps > 0) {
    const double h = cfg.dt / cfg.substeps;
    if (h * a_stiff >= 1.0) {
      throw SolverError("unstable forward Euler: h * a = " + std::to_string(h * a_stiff) +
                        " >= 1 (dt = " + std::to_string(cfg.dt) + " s, substeps = " +
                        std::to_string(cfg.substeps) + ")");
    }
    return cfg.substeps;
  }
  const double n = std::ceil(cfg.dt * a_stiff / cfg.stiffness_target);
  if (!(n < 1e7)) throw SolverError("system too stiff for explicit integration at dt = " + std::to_string(cfg.dt));
  return std::max(1, static_cast<int>(n));
}

StepResult step_svs(const SystemState& state, const DerivedRates& rates, const Environment& env, bool light_on,
                    double dt) {
  const double b0 = env.buffer_molarity;
  const double ka = env.dissociation;
  double n_h_in = (state.c_h_in + state.c_hb_in) * rates.v_in;
  double n_h_out = (state.c_h_out + state.c_hb_out) * rates.v_out;
  double n_s_in = state.c_s_in * rates.v_in;
  double n_s_out = state.c_s_out * rates.v_out;

  const double dn_h = proton_net_influx(state, rates, light_on) * dt;
  const double dn_s = symport_flux(state, rates).substrate * dt;
  if (dn_h == 0 && dn_s == 0) {
    StepResult same{state, false};
    same.state.t = state.t + dt;
    return same;
  }
  n_h_in += dn_h;
  n_h_out -= dn_h;
  n_s_in -= dn_s;
  n_s_out += dn_s;

  StepResult out;
  if (n_s_in < 0) {
    n_s_out += n_s_in;
    n_s_in = 0;
    out.depleted = true;
  }
  const auto in = equilibrate_concentration(n_h_in / rates.v_in, b0, ka);
  const auto ex = equilibrate_concentration(n_h_out / rates.v_out, b0, ka);
  out.state.t = state.t + dt;
  out.state.c_h_in = in.c_h;
  out.state.c_hb_in = in.c_hb;
  out.state.c_h_out = ex.c_h;
  out.state.c_hb_out = ex.c_hb;
  out.state.c_s_in = n_s_in / rates.v_in;
  out.state.c_s_out = n_s_out / rates.v_out;
  return out;
}

PoolResult simulate_mvs_shared_pool(std::span<const VesicleSpec> specs, const KineticConstants& k,
                                    const Environment& pool_env, const LightSignal& signal, const FdmConfig& cfg) {
  if (specs.empty()) throw ValidationError("vesicles", "at least one vesicle is required");
  cfg.validate();
  signal.validate();

  const std::size_t n = specs.size();
  const double v_pool = pool_env.v_out;
  const double b0 = pool_env.buffer_molarity;
  const double ka = pool_env.dissociation;

  Environment allotted = pool_env;
  allotted.v_out = v_pool / static_cast<double>(n);

  std::vector<VesicleCompartment> ves(n);
  double a_stiff = 0.0;
  const SystemState init = SystemState::initial(pool_env);
  std::vector<std::string> warnings;
  for (std::size_t m = 0; m < n; ++m) {
    ves[m].rates = derive_rates(specs[m], k, allotted);
    ves[m].n_h = (init.c_h_in + init.c_hb_in) * ves[m].rates.v_in;
    ves[m].n_s = init.c_s_in * ves[m].rates.v_in;
    ves[m].c_h = init.c_h_in;
    ves[m].c_hb = init.c_hb_in;
    a_stiff = std::max(a_stiff, stiffest_rate(ves[m].rates, allotted));
    if (m == 0 || n == 1) {
      warnings.insert(warnings.end(), ves[m].rates.warnings.begin(), ves[m].rates.warnings.end());
    }
  }
  const int substeps = resolve_substeps(cfg, a_stiff);
  const double h = cfg.dt / substeps;

  double n_h_out = (init.c_h_out + init.c_hb_out) * v_pool;
  double n_s_out = 0.0;
  double c_h_out = init.c_h_out;
  double c_hb_out = init.c_hb_out;

  const long n_steps = std::lround(signal.horizon / cfg.dt);
  const double depletion_level = cfg.depletion_fraction * pool_env.c_s_in0;

  PoolResult result;
  result.pool_volume = v_pool;
  result.substeps = substeps;
  result.vesicles.resize(n);
  std::vector<std::vector<Crossing>> crossings(n);
  std::vector<bool> initially_above(n);
  std::vector<bool> above(n);
  std::vector<bool> depleted(n, false);
  std::vector<double> c_prev(n);
  for (std::size_t m = 0; m < n; ++m) {
    auto& traj = result.vesicles[m];
    traj.solver = "fdm";
    traj.rates = ves[m].rates;
    traj.rates.v_out = v_pool;  // samples carry pool concentrations
    traj.warnings = warnings;
    traj.samples.reserve(static_cast<std::size_t>(n_steps / cfg.record_stride + 2));
    initially_above[m] = above[m] = ves[m].c_h >= ves[m].rates.c_switch;
    c_prev[m] = ves[m].c_h;
  }

  auto record = [&](long step, bool light) {
    const double t = static_cast<double>(step) * cfg.dt;
    result.pool.t.push_back(t);
    result.pool.c_h_out.push_back(c_h_out);
    result.pool.c_s_out.push_back(n_s_out / v_pool);
    for (std::size_t m = 0; m < n; ++m) {
      TrajectorySample s;
      s.t = t;
      s.c_h_in = ves[m].c_h;
      s.c_hb_in = ves[m].c_hb;
      s.c_h_out = c_h_out;
      s.c_hb_out = c_hb_out;
      s.c_s_in = ves[m].n_s / ves[m].rates.v_in;
      s.c_s_out = n_s_out / v_pool;
      s.light = light;
      result.vesicles[m].samples.push_back(s);
    }
  };

  for (long step = 0;; ++step) {
    const bool light = light_for_step(signal, step, cfg.dt);
    if (step % cfg.record_stride == 0 || step == n_steps) {
      record(step, step < n_steps ? light : signal.is_on(signal.horizon));
    }
    if (step == n_steps) break;

    for (int sub = 0; sub < substeps; ++sub) {
      double dn_h_pool = 0.0;
      double dn_s_pool = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        auto& v = ves[m];
        SystemState s;
        s.c_h_in = v.c_h;
        s.c_h_out = c_h_out;
        s.c_s_in = v.n_s / v.rates.v_in;
        const double dn_h = proton_net_influx(s, v.rates, light) * h;
        double dn_s = symport_flux(s, v.rates).substrate * h;
        v.n_h += dn_h;
        v.n_s -= dn_s;
        if (v.n_s < 0) {
          dn_s += v.n_s;
          v.n_s = 0;
          if (!depleted[m]) {
            depleted[m] = true;
            result.vesicles[m].depletion.push_back({(static_cast<double>(step) + 1.0) * cfg.dt, 0.0});
          }
        }
        dn_h_pool -= dn_h;
        dn_s_pool += dn_s;
        if (dn_h != 0) {
          const auto eq = equilibrate_concentration(v.n_h / v.rates.v_in, b0, ka);
          v.c_h = eq.c_h;
          v.c_hb = eq.c_hb;
        }
      }
      n_s_out += dn_s_pool;
      if (dn_h_pool != 0) {
        n_h_out += dn_h_pool;
        const auto eq = equilibrate_concentration(n_h_out / v_pool, b0, ka);
        c_h_out = eq.c_h;
        c_hb_out = eq.c_hb;
      }
    }

    const double t_next = (static_cast<double>(step) + 1.0) * cfg.dt;
    for (std::size_t m = 0; m < n; ++m) {
      auto& v = ves[m];
      const bool now_above = v.c_h >= v.rates.c_switch;
      if (now_above != above[m]) {
        const double frac = (v.rates.c_switch - c_prev[m]) / (v.c_h - c_prev[m]);
        crossings[m].push_back({t_next - (1.0 - frac) * cfg.dt, now_above});
        above[m] = now_above;
      }
      c_prev[m] = v.c_h;
      const double c_s = v.n_s / v.rates.v_in;
      if (!depleted[m] && pool_env.c_s_in0 > 0 && c_s <= depletion_level) {
        depleted[m] = true;
        result.vesicles[m].depletion.push_back({t_next, c_s});
      }
    }
  }

  for (std::size_t m = 0; m < n; ++m) {
    auto& traj = result.vesicles[m];
    traj.schedule = build_schedule(crossings[m], initially_above[m], signal);
    for (auto& s : traj.samples) {
      const auto loc = phase_at(traj.schedule, s.t);
      s.phase = loc.phase;
      s.cycle = loc.cycle;
    }
  }
  return result;
}

Trajectory simulate_svs(const VesicleSpec& spec, const KineticConstants& k, const Environment& env,
                        const LightSignal& signal, const FdmConfig& cfg) {
  auto result = simulate_mvs_shared_pool(std::span<const VesicleSpec>(&spec, 1), k, env, signal, cfg);
  return std::move(result.vesicles.front());
}

CycleSchedule schedule_from_crossings(const Trajectory& traj, const LightSignal& signal) {
  std::vector<Crossing> crossings;
  const double c_sw = traj.rates.c_switch;
  const auto& s = traj.samples;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const bool a = s[i - 1].c_h_in >= c_sw;
    const bool b = s[i].c_h_in >= c_sw;
    if (a == b) continue;
    const double frac = (c_sw - s[i - 1].c_h_in) / (s[i].c_h_in - s[i - 1].c_h_in);
    crossings.push_back({s[i - 1].t + frac * (s[i].t - s[i - 1].t), b});
  }
  const bool initially_above = !s.empty() && s.front().c_h_in >= c_sw;
  return build_schedule(crossings, initially_above, signal);
}

}  // namespace vtx
