#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vtx/errors.hpp"
#include "vtx/model.hpp"

using namespace vtx;

namespace {

DerivedRates defaults() { return derive_rates(VesicleSpec{}, KineticConstants{}, Environment{}); }

}  // namespace

TEST(DerivedRates, PumpRateFromCountAndPerPumpRate) {
  const auto r = defaults();
  EXPECT_NEAR(r.gamma_pump, 1.9927e-24, 1e-28);
  EXPECT_DOUBLE_EQ(r.gamma_pump, oracle::gamma_pump(0.03, 40));
}

TEST(DerivedRates, NoPumpsGivesZeroPumpRate) {
  VesicleSpec v;
  v.n_pumps = 0;
  EXPECT_EQ(derive_rates(v, KineticConstants{}, Environment{}).gamma_pump, 0.0);
}

TEST(DerivedRates, LeakageUsesOuterDiameter) {
  const auto r = defaults();
  EXPECT_NEAR(r.gamma_leak, 1.2465e-19, 1e-23);
  EXPECT_DOUBLE_EQ(r.gamma_leak, oracle::gamma_leak(87e-9, 14e-9, 3e-6));
}

TEST(DerivedRates, SwitchConcentration) {
  const auto r = defaults();
  EXPECT_NEAR(r.v_in, 3.448e-22, 1e-25);
  EXPECT_NEAR(r.c_switch, 4.120e-5, 1e-8);
  EXPECT_NEAR(r.c_switch, oracle::c_switch(3.98e-5, 3.98e-5, r.v_in, 1e-17, 0.015), 1e-18);
}

TEST(DerivedRates, SmallOuterVolumeWarns) {
  Environment env;
  env.v_out = 1e-21;
  EXPECT_FALSE(derive_rates(VesicleSpec{}, KineticConstants{}, env).warnings.empty());
  EXPECT_TRUE(defaults().warnings.empty());
}

TEST(DerivedRates, InvalidInputsNameTheField) {
  VesicleSpec v;
  v.d_in = -1;
  try {
    derive_rates(v, KineticConstants{}, Environment{});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "vesicle.d_in");
  }
  Environment env;
  env.buffer_molarity = -2;
  EXPECT_THROW(derive_rates(VesicleSpec{}, KineticConstants{}, env), ValidationError);
}

TEST(PumpFlux, Cases) {
  const auto r = defaults();
  auto s = SystemState::initial(Environment{});
  EXPECT_EQ(pump_flux(s, r, false), 0.0);
  EXPECT_DOUBLE_EQ(pump_flux(s, r, true), r.gamma_pump);
  s.c_h_out = r.c_h_out0 / 2;
  EXPECT_DOUBLE_EQ(pump_flux(s, r, true), r.gamma_pump / 2);
}

TEST(SymportFlux, Cases) {
  const auto r = defaults();
  auto s = SystemState::initial(Environment{});
  s.c_h_in = r.c_switch * 0.999;
  EXPECT_EQ(symport_flux(s, r).substrate, 0.0);
  EXPECT_EQ(symport_flux(s, r).proton, 0.0);

  s.c_h_in = r.c_switch;
  s.c_s_in = r.michaelis_constant;
  const auto f = symport_flux(s, r);
  EXPECT_DOUBLE_EQ(f.substrate, r.gamma_sym_s / 2);
  EXPECT_DOUBLE_EQ(f.proton, 3.0 * r.gamma_sym_s / 2);

  s.c_s_in = 0;
  EXPECT_EQ(symport_flux(s, r).substrate, 0.0);
  EXPECT_EQ(symport_flux(s, r).proton, 0.0);
}

TEST(LeakageFlux, Cases) {
  const auto r = defaults();
  SystemState s;
  s.c_h_in = s.c_h_out = 4e-5;
  EXPECT_EQ(leakage_flux(s, r), 0.0);
  s.c_h_in = 1.0 + s.c_h_out;
  EXPECT_NEAR(leakage_flux(s, r), 1.2465e-19, 1e-23);
  s.c_h_in = 0;
  EXPECT_LT(leakage_flux(s, r), 0.0);
}

TEST(ProtonNetInflux, DeadSystemIsExactlyZero) {
  const auto r = defaults();
  auto s = SystemState::initial(Environment{});
  ASSERT_LT(s.c_h_in, r.c_switch);
  EXPECT_EQ(pump_flux(s, r, false), 0.0);
  EXPECT_EQ(symport_flux(s, r).proton, 0.0);
  EXPECT_EQ(leakage_flux(s, r), 0.0);
  EXPECT_EQ(proton_net_influx(s, r, false), 0.0);
}

TEST(ProtonNetInflux, AntiporterFlipsSign) {
  VesicleSpec v;
  auto s = SystemState::initial(Environment{});
  const double sym = proton_net_influx(s, derive_rates(v, KineticConstants{}, Environment{}), true);
  v.mode = TransporterMode::antiporter;
  const double anti = proton_net_influx(s, derive_rates(v, KineticConstants{}, Environment{}), true);
  EXPECT_GT(sym, 0.0);
  EXPECT_DOUBLE_EQ(anti, -sym);
}
