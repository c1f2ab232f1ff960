#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "vtx/analytic.hpp"
#include "vtx/errors.hpp"
#include "vtx/fdm.hpp"
#include "vtx/presets.hpp"

using namespace vtx;

namespace {

// Classic RK4 for the substrate and the H+ equation of one phase with
// frozen coefficients.
struct Rk4State {
  double c_h;
  double c_s;
};

Rk4State rk4_phase(Rk4State y, const PhaseCoefficients& c, const DerivedRates& r, double elapsed, int steps) {
  const double h = elapsed / steps;
  const double rate_s = r.gamma_sym_s / r.v_in;
  const double km = r.michaelis_constant;
  auto f = [&](const Rk4State& s) {
    const double g = c.symport ? s.c_s / (s.c_s + km) : 0.0;
    return Rk4State{c.b() - c.a() * s.c_h + c.j_sym_b / c.beta * g, c.symport ? -rate_s * g : 0.0};
  };
  for (int i = 0; i < steps; ++i) {
    const auto k1 = f(y);
    const auto k2 = f({y.c_h + 0.5 * h * k1.c_h, y.c_s + 0.5 * h * k1.c_s});
    const auto k3 = f({y.c_h + 0.5 * h * k2.c_h, y.c_s + 0.5 * h * k2.c_s});
    const auto k4 = f({y.c_h + h * k3.c_h, y.c_s + h * k3.c_s});
    y.c_h += h / 6 * (k1.c_h + 2 * k2.c_h + 2 * k3.c_h + k4.c_h);
    y.c_s += h / 6 * (k1.c_s + 2 * k2.c_s + 2 * k3.c_s + k4.c_s);
  }
  return y;
}

DerivedRates rates_with(double c_s_in0, double b0 = 20) {
  Environment env;
  env.c_s_in0 = c_s_in0;
  env.buffer_molarity = b0;
  return derive_rates(VesicleSpec{}, KineticConstants{}, env);
}

}  // namespace

TEST(ExactSubstrate, InitialCondition) {
  const auto r = rates_with(300);
  EXPECT_NEAR(exact_substrate(300, r, 0.0), 300, 1e-12);
  EXPECT_NEAR(exact_substrate(0.5, r, 1e-12) / 0.5, 1.0, 1e-9);
}

TEST(ExactSubstrate, LinearRegimeMatchesClosedForm) {
  const auto r = rates_with(300);
  for (double dt : {1.0, 10.0, 100.0}) {
    const double lin = closed_form_substrate(300, r, dt);
    EXPECT_LT(oracle::rel_err(exact_substrate(300, r, dt), lin), 5e-3) << dt;
  }
}

TEST(ExactSubstrate, MatchesRk4ThroughTheTail) {
  const auto r = rates_with(0.2);
  Environment env;
  const auto c = phase_coefficients(r, env, false, true, 5e-5);
  Rk4State y{5e-5, 0.2};
  double t = 0;
  for (int seg = 0; seg < 20; ++seg) {
    y = rk4_phase(y, c, r, 100.0, 4000);
    t += 100.0;
    const double w = exact_substrate(0.2, r, t);
    ASSERT_NEAR(w / y.c_s - 1.0, 0.0, 1e-8) << "t=" << t << " c_s=" << y.c_s;
  }
}

TEST(ExactProton, FixedPointWithoutSymport) {
  const auto r = rates_with(300, 0);
  auto c = phase_coefficients(r, Environment{}, false, false, 3.98e-5);
  const double fixed = c.b() / c.a();
  EXPECT_NEAR(exact_proton(fixed, c, r, 300, 0, 50.0) / fixed, 1.0, 1e-14);
}

TEST(ExactProton, LongIlluminationApproachesEquilibrium) {
  Environment env;
  env.buffer_molarity = 0;
  const VesicleSpec v;
  const auto r = derive_rates(v, KineticConstants{}, env);
  const auto c = phase_coefficients(r, env, true, false, env.c_h_in0);
  const double c_eq = oracle::c_eq(env.c_h_out0, 0.03, v.n_pumps, v.d_in, v.d_mem, v.permeability);
  EXPECT_LT(oracle::rel_err(exact_proton(env.c_h_in0, c, r, 300, 0, 1e3), c_eq), 1e-3);
  EXPECT_LT(oracle::rel_err(c.b_prime() / c.a(), c_eq), 1e-3);
}

TEST(ExactProton, MatchesRk4WithSymport) {
  for (double c_s0 : {300.0, 0.05}) {
    const auto r = rates_with(c_s0, 0);
    Environment env;
    env.buffer_molarity = 0;
    for (bool light : {true, false}) {
      const auto c = phase_coefficients(r, env, light, true, 4.3e-5);
      for (double dt : {1e-3, 0.05, 1.0, 30.0}) {
        const auto ref = rk4_phase({4.3e-5, c_s0}, c, r, dt, 20000);
        const double got = exact_proton(4.3e-5, c, r, c_s0, 0.0, dt);
        EXPECT_NEAR(got / ref.c_h - 1.0, 0.0, 1e-8) << "c_s0=" << c_s0 << " light=" << light << " dt=" << dt;
      }
    }
  }
}

TEST(ClosedFormSubstrate, Cases) {
  const auto r = rates_with(300);
  EXPECT_EQ(closed_form_substrate(300, r, 0.0), 300);
  const double t_dep = r.v_in * 300 / r.gamma_sym_s;
  EXPECT_NEAR(closed_form_substrate(300, r, t_dep), 0.0, 1e-9);
  EXPECT_EQ(closed_form_substrate(300, r, 2 * t_dep), 0.0);
}

TEST(ClosedFormProton, Cases) {
  Environment env;
  env.buffer_molarity = 0;
  const VesicleSpec v;
  const auto r = derive_rates(v, KineticConstants{}, env);
  const auto c = phase_coefficients(r, env, true, false, env.c_h_in0);
  EXPECT_EQ(closed_form_proton(env.c_h_in0, c, 0.0), env.c_h_in0);
  const double c_eq = oracle::c_eq(env.c_h_out0, 0.03, v.n_pumps, v.d_in, v.d_mem, v.permeability);
  EXPECT_LT(oracle::rel_err(closed_form_proton(env.c_h_in0, c, 1e4), c_eq), 1e-3);
}

TEST(ClosedFormProton, BufferAttenuatesInitialSlope) {
  const Environment buffered;
  Environment plain;
  plain.buffer_molarity = 0;
  const VesicleSpec v;
  const auto rb = derive_rates(v, KineticConstants{}, buffered);
  const auto cb = phase_coefficients(rb, buffered, true, false, buffered.c_h_in0);
  const auto cp = phase_coefficients(derive_rates(v, KineticConstants{}, plain), plain, true, false, plain.c_h_in0);
  const double beta_ref = 6.2e-5 * 20 / std::pow(3.98e-5 + 6.2e-5, 2);
  EXPECT_NEAR(cb.beta / beta_ref, 1.0, 1e-12);
  EXPECT_NEAR(cb.beta / 1.1966e5, 1.0, 1e-4);
  const double slope_b = cb.b_prime() - cb.a() * buffered.c_h_in0;
  const double slope_p = cp.b_prime() - cp.a() * plain.c_h_in0;
  EXPECT_NEAR(slope_p / slope_b / cb.beta, 1.0, 1e-9);
}

TEST(RunAnalytic, DeadSystemIsConstant) {
  VesicleSpec v;
  v.n_pumps = 0;
  v.n_symporters = 0;
  const Environment env;
  LightSignal sig{{{0, 50}}, 100};
  for (auto mode : {AnalyticMode::exact, AnalyticMode::closed}) {
    const auto traj = run_analytic(v, KineticConstants{}, env, sig, mode);
    for (const auto& s : traj.samples) {
      ASSERT_NEAR(s.c_h_in / env.c_h_in0, 1.0, 1e-12);
      ASSERT_EQ(s.c_s_in, env.c_s_in0);
    }
  }
}

TEST(RunAnalytic, AntiporterRejected) {
  VesicleSpec v;
  v.mode = TransporterMode::antiporter;
  LightSignal sig{{{0, 50}}, 100};
  EXPECT_THROW(run_analytic(v, KineticConstants{}, Environment{}, sig, AnalyticMode::closed), SolverError);
}

TEST(RunAnalytic, Fig3ClosedFormSlopesOrderedAndConverge) {
  const auto cfg = preset("fig3");
  double last_slope = std::numeric_limits<double>::infinity();
  for (const auto& variant : cfg.variants) {
    const auto c = apply_variant(cfg, variant);
    const auto traj = run_analytic(*c.vesicle, c.kinetics, c.environment, c.light, AnalyticMode::closed);
    const double slope = (traj.samples[1].c_h_in - traj.samples[0].c_h_in) / traj.samples[1].t;
    EXPECT_LT(slope, last_slope) << variant.label;
    last_slope = slope;
  }
}

TEST(RunAnalytic, UnbufferedFig4AgreesWithFdm) {
  auto cfg = preset("fig4");
  cfg.environment.buffer_molarity = 0;
  const auto fdm = simulate_svs(*cfg.vesicle, cfg.kinetics, cfg.environment, cfg.light, cfg.fdm);
  const auto ex = run_analytic(*cfg.vesicle, cfg.kinetics, cfg.environment, cfg.light, AnalyticMode::exact);
  ASSERT_EQ(fdm.samples.size(), ex.samples.size());
  double worst = 0;
  for (std::size_t i = 0; i < fdm.samples.size(); ++i) {
    worst = std::max(worst, oracle::rel_err(ex.samples[i].c_h_in, fdm.samples[i].c_h_in));
  }
  EXPECT_LT(worst, 2e-2);
}

TEST(RunAnalytic, ClosedFormSubstrateIsPiecewiseLinear) {
  const auto cfg = preset("fig4");
  const auto traj = run_analytic(*cfg.vesicle, cfg.kinetics, cfg.environment, cfg.light, AnalyticMode::closed);
  const double slope = traj.rates.gamma_sym_s / traj.rates.v_out;
  const double dt = cfg.analytic.dt_out;
  auto active = [&](double t) {
    for (const auto& c : traj.schedule.cycles) {
      if (c.t2 < t && t < c.t4) return 1;
      if (std::abs(t - c.t2) <= dt || std::abs(t - c.t4) <= dt) return -1;
    }
    return 0;
  };
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    const auto& p = traj.samples[i - 1];
    const auto& q = traj.samples[i];
    const int a0 = active(p.t), a1 = active(q.t);
    if (a0 < 0 || a1 < 0 || a0 != a1) continue;
    const double ds = (q.c_s_out - p.c_s_out) / (q.t - p.t);
    if (a0 == 1) ASSERT_NEAR(ds / slope, 1.0, 1e-6) << "t=" << p.t;
    else ASSERT_EQ(ds, 0.0) << "t=" << p.t;
  }
}

TEST(RunAnalytic, ConcentrationsContinuousAcrossPhaseBoundaries) {
  const auto cfg = preset("fig4");
  for (auto mode : {AnalyticMode::exact, AnalyticMode::closed}) {
    const auto traj = run_analytic(*cfg.vesicle, cfg.kinetics, cfg.environment, cfg.light, mode);
    // Largest step anywhere is bounded by the steepest rate times dt; a jump
    // at a boundary would stand out against the neighbouring steps.
    for (std::size_t i = 2; i + 1 < traj.samples.size(); ++i) {
      const double d = std::abs(traj.samples[i].c_h_in - traj.samples[i - 1].c_h_in);
      const double around = std::max(std::abs(traj.samples[i - 1].c_h_in - traj.samples[i - 2].c_h_in),
                                     std::abs(traj.samples[i + 1].c_h_in - traj.samples[i].c_h_in));
      ASSERT_LE(d, 3.0 * around + 1e-12 * traj.samples[i].c_h_in) << "t=" << traj.samples[i].t;
    }
  }
}
