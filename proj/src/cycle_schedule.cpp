#include "vtx/cycle_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vtx/errors.hpp"

namespace vtx {

void LightSignal::validate() const {
  if (!(horizon > 0)) throw ValidationError("light.horizon", "must be > 0");
  double last_off = 0.0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    const std::string path = "light.windows[" + std::to_string(i) + "]";
    if (!(w.t_on >= 0)) throw ValidationError(path, "t_on must be >= 0");
    if (!(w.t_on < w.t_off)) throw ValidationError(path, "t_on must be < t_off");
    if (i > 0 && w.t_on < last_off) throw ValidationError(path, "overlaps the previous window");
    if (w.t_off > horizon) throw ValidationError(path, "ends after the horizon");
    last_off = w.t_off;
  }
}

bool LightSignal::is_on(double t) const {
  return std::any_of(windows.begin(), windows.end(), [t](const Window& w) { return w.t_on <= t && t < w.t_off; });
}

double LightSignal::next_switch_after(double t) const {
  for (const auto& w : windows) {
    if (w.t_on > t) return w.t_on;
    if (w.t_off > t) return w.t_off;
  }
  return std::numeric_limits<double>::infinity();
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::p1: return "P1";
    case Phase::p2: return "P2";
    case Phase::p3: return "P3";
    case Phase::p4: return "P4";
  }
  return "?";
}

std::string_view to_string(CycleType c) {
  switch (c) {
    case CycleType::a: return "a";
    case CycleType::b: return "b";
    case CycleType::c: return "c";
  }
  return "?";
}

PhaseLocation phase_at(const CycleSchedule& schedule, double t) {
  if (t > schedule.resolved_until) {
    throw std::out_of_range("schedule resolved only up to t = " + std::to_string(schedule.resolved_until) +
                            " s; advance the solver first");
  }
  if (t < 0) throw std::out_of_range("negative time");

  double prev_end = 0.0;  // t4 of the previous cycle
  const int n = static_cast<int>(schedule.cycles.size());
  for (int i = 0; i < n; ++i) {
    const auto& c = schedule.cycles[i];
    if (t > c.t4) {
      prev_end = c.t4;
      continue;
    }
    const int cycle = i + 1;
    if (t <= c.t1) return {cycle, Phase::p1, prev_end};
    if (t <= c.t2) return {cycle, Phase::p2, c.t1};
    if (t <= c.t3) return {cycle, Phase::p3, c.t2};
    return {cycle, Phase::p4, c.t3};
  }
  // Trailing dark phase after the last completed cycle.
  return {n + 1, Phase::p1, prev_end};
}

std::optional<double> predict_symport_time(double c_start, double c_switch, double a, double b_prime,
                                           double t_prev) {
  if (!(a > 0)) throw std::invalid_argument("predict_symport_time: a must be > 0");
  if (c_start == c_switch) return t_prev;
  const double c_inf = b_prime / a;
  const double ratio = (c_switch - c_inf) / (c_start - c_inf);
  if (!(ratio > 0) || ratio > 1 || !std::isfinite(ratio)) return std::nullopt;
  return t_prev - std::log(ratio) / a;
}

ClippedTimes clip_cycle_times(double t2_estimate, double t4_estimate, double t1, double t3, double t1_next) {
  ClippedTimes out;
  out.t2 = std::max(std::min(t3, t2_estimate), t1);
  out.t4 = std::max(std::min(t1_next, t4_estimate), t3);
  return out;
}

void classify_cycles(CycleSchedule& schedule) {
  auto& cycles = schedule.cycles;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    auto& c = cycles[i];
    if (c.t4 == c.t2) {
      c.type = CycleType::b;
      continue;
    }
    const bool merges_next = i + 1 < cycles.size() && c.t4 == cycles[i + 1].t1;
    const bool merges_prev = i > 0 && cycles[i - 1].t4 == c.t1 && c.t2 == c.t1 && cycles[i - 1].t4 != cycles[i - 1].t2;
    c.type = (merges_next || merges_prev) ? CycleType::c : CycleType::a;
  }
}

}  // namespace vtx
