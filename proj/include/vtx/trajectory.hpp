#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vtx/cycle_schedule.hpp"
#include "vtx/model.hpp"

namespace vtx {

struct TrajectorySample {
  double t = 0;
  double c_h_in = 0;
  double c_h_out = 0;
  double c_s_in = 0;
  double c_s_out = 0;
  double c_hb_in = 0;
  double c_hb_out = 0;
  Phase phase = Phase::p1;
  int cycle = 1;
  bool light = false;
  // Buffer attenuation used by the analytic solvers for the current phase
  // and its value at the sample's own C_H_in. Both 1 for FDM and B0 = 0.
  double beta_phase = 1;
  double beta_instant = 1;
};

struct DepletionEvent {
  double t = 0;
  double c_s_in = 0;
};

struct Trajectory {
  std::string solver;  // "fdm", "exact", "closed"
  DerivedRates rates;
  std::vector<TrajectorySample> samples;
  CycleSchedule schedule;
  std::vector<DepletionEvent> depletion;
  std::vector<std::string> warnings;

  /// Free + complexed H+ in both compartments, mol, for sample i.
  double total_h(std::size_t i) const;
  /// Substrate in both compartments, mol, for sample i.
  double total_s(std::size_t i) const;
};

/// Columns t,C_H_in,C_H_out,C_S_in,C_S_out,phase,cycle,light; analytic
/// trajectories append a solver column. Shortest round-trip doubles.
void write_csv(std::ostream& os, const Trajectory& traj);
std::string trajectory_csv_header(bool with_solver);

/// Times at which (C_H_in - C_switch) changes sign, linearly interpolated
/// between consecutive samples.
std::vector<double> threshold_crossings(const Trajectory& traj);

}  // namespace vtx
