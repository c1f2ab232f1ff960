#pragma once

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace vtx {

/// Binary illumination l(t): on for t in [t_on, t_off) of each window.
struct LightSignal {
  struct Window {
    double t_on = 0;
    double t_off = 0;
  };
  std::vector<Window> windows;
  double horizon = 0;  // total simulated duration, s

  /// Strictly increasing, non-overlapping windows inside [0, horizon].
  void validate() const;
  bool is_on(double t) const;
  /// First on/off switch strictly after t, or +inf.
  double next_switch_after(double t) const;
};

enum class Phase { p1 = 1, p2 = 2, p3 = 3, p4 = 4 };
enum class CycleType { a, b, c };

std::string_view to_string(Phase p);
std::string_view to_string(CycleType c);

/// P1 dark/no symport, P2 lit/no symport, P3 lit+symport, P4 dark+symport.
constexpr Phase phase_of(bool light_on, bool symport_on) {
  if (light_on) return symport_on ? Phase::p3 : Phase::p2;
  return symport_on ? Phase::p4 : Phase::p1;
}

/// Phase boundaries of one illumination cycle: pump start t1, symport
/// start t2, pump end t3, symport end t4. t4 is +inf while unresolved.
struct CycleTimes {
  double t1 = 0;
  double t2 = 0;
  double t3 = 0;
  double t4 = std::numeric_limits<double>::infinity();
  CycleType type = CycleType::a;
};

struct CycleSchedule {
  std::vector<CycleTimes> cycles;
  double resolved_until = 0;  // phase_at is defined on [0, resolved_until]
};

struct PhaseLocation {
  int cycle = 1;  // 1-based
  Phase phase = Phase::p1;
  double t_sec = 0;  // start of the current phase
};

/// Locates t in the schedule. Zero-length phases are skipped. Throws
/// std::out_of_range when t lies beyond the resolved part.
PhaseLocation phase_at(const CycleSchedule& schedule, double t);

/// Time at which C(t) = c_inf + (c_start - c_inf) exp(-a (t - t_prev)) hits
/// c_switch, where c_inf = b_prime / a. Empty when no forward crossing exists.
std::optional<double> predict_symport_time(double c_start, double c_switch, double a, double b_prime,
                                           double t_prev);

struct ClippedTimes {
  double t2 = 0;
  double t4 = 0;
};

/// Forces t1 <= t2 <= t3 <= t4 <= t1_next from raw estimates.
ClippedTimes clip_cycle_times(double t2_estimate, double t4_estimate, double t1, double t3, double t1_next);

/// (b): zero symport duration; (c): symport merges with a neighbouring cycle;
/// (a) otherwise.
void classify_cycles(CycleSchedule& schedule);

}  // namespace vtx
