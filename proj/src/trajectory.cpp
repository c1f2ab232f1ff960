#include "vtx/trajectory.hpp"

#include <ostream>

#include "vtx/units.hpp"

namespace vtx {

double Trajectory::total_h(std::size_t i) const {
  const auto& s = samples.at(i);
  return (s.c_h_in + s.c_hb_in) * rates.v_in + (s.c_h_out + s.c_hb_out) * rates.v_out;
}

double Trajectory::total_s(std::size_t i) const {
  const auto& s = samples.at(i);
  return s.c_s_in * rates.v_in + s.c_s_out * rates.v_out;
}

std::string trajectory_csv_header(bool with_solver) {
  std::string h = "t,C_H_in,C_H_out,C_S_in,C_S_out,phase,cycle,light";
  if (with_solver) h += ",solver";
  return h;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  const bool with_solver = traj.solver != "fdm";
  os << trajectory_csv_header(with_solver) << '\n';
  for (const auto& s : traj.samples) {
    os << units::to_text(s.t) << ',' << units::to_text(s.c_h_in) << ',' << units::to_text(s.c_h_out) << ','
       << units::to_text(s.c_s_in) << ',' << units::to_text(s.c_s_out) << ',' << to_string(s.phase) << ','
       << s.cycle << ',' << (s.light ? 1 : 0);
    if (with_solver) os << ',' << traj.solver;
    os << '\n';
  }
}

std::vector<double> threshold_crossings(const Trajectory& traj) {
  std::vector<double> out;
  const double c_sw = traj.rates.c_switch;
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    const auto& p = traj.samples[i - 1];
    const auto& q = traj.samples[i];
    const bool above_p = p.c_h_in >= c_sw;
    const bool above_q = q.c_h_in >= c_sw;
    if (above_p == above_q) continue;
    const double frac = (c_sw - p.c_h_in) / (q.c_h_in - p.c_h_in);
    out.push_back(p.t + frac * (q.t - p.t));
  }
  return out;
}

}  // namespace vtx
