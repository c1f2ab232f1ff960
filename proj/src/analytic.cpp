#include "vtx/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vtx/buffer.hpp"
#include "vtx/errors.hpp"
#include "vtx/lambert_w.hpp"

namespace vtx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Beyond this many relaxation times the kernel exp(-a u) is below 1e-17.
constexpr double kKernelSpan = 40.0;

}  // namespace

double PhaseCoefficients::a() const { return (j_l_a + (light ? j_p_a : 0.0)) / beta; }

double PhaseCoefficients::b() const { return (j_l_b + (light ? j_p_b : 0.0)) / beta; }

double PhaseCoefficients::b_prime() const { return b() + (symport ? j_sym_b / beta : 0.0); }

PhaseCoefficients phase_coefficients(const DerivedRates& r, const Environment& env, bool light, bool symport,
                                     double c_h_start) {
  PhaseCoefficients c;
  c.j_l_a = r.gamma_leak * (1.0 / r.v_in + 1.0 / r.v_out);
  c.j_p_a = r.gamma_pump / (r.v_out * r.c_h_out0);
  c.j_l_b = r.gamma_leak * r.n_h / (r.v_in * r.v_out);
  c.j_p_b = r.gamma_pump * r.n_h / (r.v_out * r.c_h_out0 * r.v_in);
  c.j_sym_b = -r.gamma_sym_h / r.v_in;
  c.beta = buffer_attenuation(c_h_start, env.buffer_molarity, env.dissociation);
  c.light = light;
  c.symport = symport;
  return c;
}

double exact_substrate(double c_s_start, const DerivedRates& r, double elapsed) {
  if (c_s_start <= 0) return 0.0;
  if (elapsed <= 0 || r.gamma_sym_s == 0) return c_s_start;
  const double km = r.michaelis_constant;
  const double y = std::log(c_s_start / km) + (c_s_start - r.gamma_sym_s / r.v_in * elapsed) / km;
  return km * lambert_w0_exp(y);
}

double exact_proton(double c_h_start, const PhaseCoefficients& c, const DerivedRates& r, double c_s_start,
                    double s_offset, double elapsed) {
  const double a = c.a();
  const double b = c.b();
  const double decay = std::exp(-a * elapsed);
  const double linear = b / a + (c_h_start - b / a) * decay;
  if (!c.symport || elapsed <= 0 || c_s_start <= 0) return linear;

  const double km = r.michaelis_constant;
  auto kernel = [&](double u) {
    const double cs = exact_substrate(c_s_start, r, s_offset + elapsed - u);
    return cs / (cs + km) * std::exp(-a * u);
  };
  const double span = std::min(elapsed, kKernelSpan / a);
  constexpr double tol = 1e-10;
  double error = 0;
  double l1 = 0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(kernel, 0.0, span, 30, tol, &error, &l1);
  if (!(error <= 1e-8 * std::max(l1, std::numeric_limits<double>::min())) || !std::isfinite(integral)) {
    throw SolverError("symport H+ integral did not converge over " + std::to_string(span) +
                      " s: estimate " + std::to_string(integral) + ", error " + std::to_string(error));
  }
  return linear + c.j_sym_b / c.beta * integral;
}

double closed_form_substrate(double c_s_start, const DerivedRates& r, double elapsed) {
  if (elapsed <= 0) return c_s_start;
  return std::max(0.0, c_s_start - r.gamma_sym_s / r.v_in * elapsed);
}

double closed_form_proton(double c_h_start, const PhaseCoefficients& c, double elapsed) {
  const double a = c.a();
  const double c_inf = c.b_prime() / a;
  return c_inf + (c_h_start - c_inf) * std::exp(-a * elapsed);
}

void AnalyticConfig::validate() const {
  if (!(dt_out > 0)) throw ValidationError("analytic.dt_out", "must be > 0");
  if (!(depletion_fraction >= 0 && depletion_fraction < 1)) {
    throw ValidationError("analytic.depletion_fraction", "must lie in [0, 1)");
  }
}

namespace {

enum class Event { light_switch, symport_on, symport_off, depletion, horizon };

struct CycleRecord {
  double t2 = kInf;
  double t4 = kInf;
};

}  // namespace

Trajectory run_analytic(const VesicleSpec& spec, const KineticConstants& k, const Environment& env,
                        const LightSignal& signal, AnalyticMode mode, const AnalyticConfig& cfg) {
  cfg.validate();
  signal.validate();
  if (spec.mode != TransporterMode::symporter) {
    throw SolverError("analytic solvers support symporter mode only");
  }
  const bool exact = mode == AnalyticMode::exact;

  Trajectory traj;
  traj.solver = exact ? "exact" : "closed";
  traj.rates = derive_rates(spec, k, env);
  traj.warnings = traj.rates.warnings;
  const DerivedRates& r = traj.rates;
  const double b0 = env.buffer_molarity;
  const double ka = env.dissociation;
  const double c_sw = r.c_switch;

  const double total_h_mol =
      (total_concentration(env.c_h_in0, b0, ka) * r.v_in + total_concentration(env.c_h_out0, b0, ka) * r.v_out);
  auto make_sample = [&](double t, double c_h, double c_s, double beta_phase) {
    TrajectorySample s;
    s.t = t;
    s.c_h_in = c_h;
    s.c_hb_in = total_concentration(c_h, b0, ka) - c_h;
    const auto out = equilibrate_concentration((total_h_mol - (c_h + s.c_hb_in) * r.v_in) / r.v_out, b0, ka);
    s.c_h_out = out.c_h;
    s.c_hb_out = out.c_hb;
    s.c_s_in = c_s;
    s.c_s_out = (r.n_s - c_s * r.v_in) / r.v_out;
    s.light = signal.is_on(t);
    s.beta_phase = beta_phase;
    s.beta_instant = buffer_attenuation(c_h, b0, ka);
    return s;
  };

  const auto& windows = signal.windows;
  std::vector<CycleRecord> records(windows.size());
  int window = -1;  // index of the latest window switched on

  double t = 0.0;
  double c_h = env.c_h_in0;
  double c_s = env.c_s_in0;
  bool light = signal.is_on(0.0);
  bool symport = false;
  bool depleted = c_s <= 0;
  bool depletion_recorded = false;
  const double depletion_level = cfg.depletion_fraction * env.c_s_in0;

  const long n_out = std::lround(signal.horizon / cfg.dt_out);
  long next_k = 0;
  traj.samples.reserve(static_cast<std::size_t>(n_out + 1));

  if (light) {
    window = 0;
    if (c_h >= c_sw) {
      symport = true;
      records[0].t2 = 0.0;
    }
  }

  while (true) {
    const bool flux = symport && !depleted;
    const auto coeffs = phase_coefficients(r, env, light, flux, c_h);
    const double a = coeffs.a();
    const double t_phase = t;
    const double c_h_phase = c_h;
    const double c_s_phase = c_s;

    const double t_switch = signal.next_switch_after(t);
    double t_end = std::min(t_switch, signal.horizon);
    Event event = t_switch <= signal.horizon ? Event::light_switch : Event::horizon;
    auto consider = [&](double te, Event e) {
      if (te < t_end) {
        t_end = std::max(te, t);
        event = e;
      }
    };
    if (light && !symport) {
      if (auto te = predict_symport_time(c_h, c_sw, a, coeffs.b(), t)) consider(*te, Event::symport_on);
    } else if (!light && symport) {
      if (auto te = predict_symport_time(c_h, c_sw, a, coeffs.b_prime(), t)) consider(*te, Event::symport_off);
    }
    if (!exact && flux && r.gamma_sym_s > 0) {
      consider(t + r.v_in * c_s / r.gamma_sym_s, Event::depletion);
    }

    auto substrate_at = [&](double elapsed) {
      if (!flux) return c_s_phase;
      return exact ? exact_substrate(c_s_phase, r, elapsed) : closed_form_substrate(c_s_phase, r, elapsed);
    };
    // Exact mode chains the quadrature from sample to sample; the closed form
    // is evaluated from the phase start.
    double t_seg = t_phase;
    double c_h_seg = c_h_phase;
    auto proton_at = [&](double tt) {
      if (!exact) return closed_form_proton(c_h_phase, coeffs, tt - t_phase);
      const double v = exact_proton(c_h_seg, coeffs, r, substrate_at(t_seg - t_phase), 0.0, tt - t_seg);
      t_seg = tt;
      c_h_seg = v;
      return v;
    };

    for (; next_k <= n_out; ++next_k) {
      const double tk = next_k == n_out ? signal.horizon : static_cast<double>(next_k) * cfg.dt_out;
      if (tk > t_end) break;
      if (tk < t_phase) continue;
      const double ch = tk == t_phase ? c_h_phase : proton_at(tk);
      const double cs = substrate_at(tk - t_phase);
      traj.samples.push_back(make_sample(tk, ch, cs, coeffs.beta));
      if (!depletion_recorded && env.c_s_in0 > 0 && cs <= depletion_level && exact) {
        depletion_recorded = true;
        traj.depletion.push_back({tk, cs});
      }
    }

    c_h = t_end == t_seg ? c_h_seg : proton_at(t_end);
    c_s = substrate_at(t_end - t_phase);
    t = t_end;

    switch (event) {
      case Event::light_switch:
        light = signal.is_on(t);
        if (light) {
          const std::size_t next = static_cast<std::size_t>(window + 1);
          if (symport && window >= 0) records[window].t4 = t;  // merges into the next cycle
          window = static_cast<int>(next);
          if (symport || c_h >= c_sw) {
            symport = true;
            records[window].t2 = t;
          }
        } else if (!symport) {
          records[window].t2 = t;
          records[window].t4 = t;
        }
        break;
      case Event::symport_on:
        symport = true;
        records[window].t2 = t;
        break;
      case Event::symport_off:
        symport = false;
        if (window >= 0) records[window].t4 = t;
        break;
      case Event::depletion:
        depleted = true;
        c_s = 0.0;
        traj.depletion.push_back({t, 0.0});
        break;
      case Event::horizon:
        break;
    }
    if (t >= signal.horizon) break;
  }

  auto& schedule = traj.schedule;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    CycleTimes c;
    c.t1 = windows[i].t_on;
    c.t3 = windows[i].t_off;
    const double t1_next = i + 1 < windows.size() ? windows[i + 1].t_on : kInf;
    const auto clipped = clip_cycle_times(records[i].t2, records[i].t4, c.t1, c.t3, t1_next);
    c.t2 = clipped.t2;
    c.t4 = clipped.t4;
    schedule.cycles.push_back(c);
  }
  schedule.resolved_until = signal.horizon;
  classify_cycles(schedule);
  for (auto& s : traj.samples) {
    const auto loc = phase_at(schedule, s.t);
    s.phase = loc.phase;
    s.cycle = loc.cycle;
  }
  return traj;
}

}  // namespace vtx
