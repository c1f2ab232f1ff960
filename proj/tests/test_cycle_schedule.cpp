#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "vtx/cycle_schedule.hpp"
#include "vtx/fdm.hpp"
#include "vtx/presets.hpp"

using namespace vtx;

TEST(LightSignal, Validation) {
  LightSignal s{{{10, 35}, {50, 80}}, 100};
  EXPECT_NO_THROW(s.validate());
  EXPECT_TRUE(s.is_on(10));
  EXPECT_FALSE(s.is_on(35));
  EXPECT_EQ(s.next_switch_after(10), 35);
  EXPECT_EQ(s.next_switch_after(35), 50);
  EXPECT_TRUE(std::isinf(s.next_switch_after(80)));

  LightSignal overlap{{{10, 35}, {30, 40}}, 100};
  EXPECT_THROW(overlap.validate(), std::invalid_argument);
  LightSignal late{{{10, 135}}, 100};
  EXPECT_THROW(late.validate(), std::invalid_argument);
}

TEST(PhaseAt, InitialLeakagePhase) {
  CycleSchedule s;
  s.cycles.push_back({10, 20, 30, 40, CycleType::a});
  s.resolved_until = 100;
  const auto loc = phase_at(s, 5);
  EXPECT_EQ(loc.cycle, 1);
  EXPECT_EQ(loc.phase, Phase::p1);
  EXPECT_EQ(loc.t_sec, 0.0);
  EXPECT_EQ(phase_at(s, 15).phase, Phase::p2);
  EXPECT_EQ(phase_at(s, 25).phase, Phase::p3);
  EXPECT_EQ(phase_at(s, 35).phase, Phase::p4);
  EXPECT_EQ(phase_at(s, 35).t_sec, 30.0);
  EXPECT_EQ(phase_at(s, 50).cycle, 2);
  EXPECT_THROW(phase_at(s, 101), std::out_of_range);
}

TEST(PhaseAt, ZeroLengthPhasesAreSkipped) {
  CycleSchedule s;
  s.cycles.push_back({10, 30, 30, 30, CycleType::b});
  s.resolved_until = 50;
  EXPECT_EQ(phase_at(s, 20).phase, Phase::p2);
  EXPECT_EQ(phase_at(s, 31).phase, Phase::p1);
}

TEST(PhaseAt, InsideSecondFig4WindowAfterCrossing) {
  const auto cfg = preset("fig4");
  const auto traj = simulate_svs(*cfg.vesicle, cfg.kinetics, cfg.environment, cfg.light, cfg.fdm);
  const auto loc = phase_at(traj.schedule, 60.0);
  EXPECT_EQ(loc.cycle, 2);
  EXPECT_EQ(loc.phase, Phase::p3);
}

TEST(PredictSymportTime, Cases) {
  EXPECT_EQ(*predict_symport_time(4e-5, 4e-5, 0.5, 1e-5, 7.0), 7.0);
  // Asymptote below the threshold.
  EXPECT_FALSE(predict_symport_time(3.9e-5, 4.1e-5, 1.0, 4.0e-5, 0.0).has_value());
  // Interior crossing: c_inf = 5e-5, start 3e-5, threshold 4e-5 -> ln 2 / a.
  const auto t = predict_symport_time(3e-5, 4e-5, 2.0, 1e-4, 1.0);
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(*t, 1.0 + std::log(2.0) / 2.0, 1e-14);
  EXPECT_THROW(predict_symport_time(3e-5, 4e-5, 0.0, 1e-4, 1.0), std::invalid_argument);
}

TEST(ClipCycleTimes, Cases) {
  const auto b = clip_cycle_times(50, 20, 10, 35, 50);
  EXPECT_EQ(b.t2, 35);
  EXPECT_EQ(b.t4, 35);
  const auto c = clip_cycle_times(20, 70, 10, 35, 50);
  EXPECT_EQ(c.t2, 20);
  EXPECT_EQ(c.t4, 50);
  const auto a = clip_cycle_times(20, 40, 10, 35, 50);
  EXPECT_EQ(a.t2, 20);
  EXPECT_EQ(a.t4, 40);
}

TEST(ClassifyCycles, AllThreeTypes) {
  CycleSchedule s;
  s.cycles = {{10, 35, 35, 35}, {50, 56, 80, 99}, {110, 111, 140, 150}, {150, 150, 180, 214}};
  classify_cycles(s);
  EXPECT_EQ(s.cycles[0].type, CycleType::b);
  EXPECT_EQ(s.cycles[1].type, CycleType::a);
  EXPECT_EQ(s.cycles[2].type, CycleType::c);
  EXPECT_EQ(s.cycles[3].type, CycleType::c);
}

TEST(Schedule, BoundariesAreNonDecreasing) {
  const auto cfg = preset("fig4");
  const auto traj = simulate_svs(*cfg.vesicle, cfg.kinetics, cfg.environment, cfg.light, cfg.fdm);
  double last = 0;
  for (const auto& c : traj.schedule.cycles) {
    EXPECT_LE(last, c.t1);
    EXPECT_LE(c.t1, c.t2);
    EXPECT_LE(c.t2, c.t3);
    EXPECT_LE(c.t3, c.t4);
    last = c.t4;
  }
}
