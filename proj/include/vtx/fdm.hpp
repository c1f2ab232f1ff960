#pragma once

#include <span>
#include <vector>

#include "vtx/cycle_schedule.hpp"
#include "vtx/model.hpp"
#include "vtx/trajectory.hpp"

namespace vtx {

/// Forward-Euler integration settings.
///
/// `dt` is the output and crossing-detection grid. Each dt is integrated in
/// `substeps` equal Euler steps; 0 picks the smallest count with
/// h * a_stiff <= stiffness_target, fixed for the whole run. An explicit count
/// with h * a_stiff >= 1 is rejected.
struct FdmConfig {
  double dt = 1e-2;
  int record_stride = 1;
  int substeps = 0;
  double stiffness_target = 1e-2;
  // Michaelis-Menten kinetics never reach zero; depletion is recorded when
  // C_S_in first drops to this fraction of its initial value.
  double depletion_fraction = 1e-3;

  void validate() const;
};

/// Largest relaxation rate of the system, 1/s: the H+ phase coefficient
/// divided by the smallest buffer capacity reachable, or the
/// Michaelis-Menten substrate rate, whichever is larger.
double stiffest_rate(const DerivedRates& r, const Environment& env);

/// Euler substeps per dt (throws SolverError on an unstable explicit count).
int resolve_substeps(const FdmConfig& cfg, double a_stiff);

struct StepResult {
  SystemState state;
  bool depleted = false;  // substrate went negative and was clamped
};

/// One Euler step of a single-vesicle system followed by re-equilibration of
/// both compartments.
StepResult step_svs(const SystemState& state, const DerivedRates& rates, const Environment& env, bool light_on,
                    double dt);

Trajectory simulate_svs(const VesicleSpec& spec, const KineticConstants& k, const Environment& env,
                        const LightSignal& signal, const FdmConfig& cfg);

struct PoolSeries {
  std::vector<double> t;
  std::vector<double> c_h_out;
  std::vector<double> c_s_out;
};

struct PoolResult {
  std::vector<Trajectory> vesicles;
  PoolSeries pool;
  double pool_volume = 0;
  int substeps = 1;
};

/// Vesicles exchanging with one common extravesicular compartment of volume
/// `pool_env.v_out`; each vesicle's allotted volume (for C_switch) is
/// pool_env.v_out / specs.size().
PoolResult simulate_mvs_shared_pool(std::span<const VesicleSpec> specs, const KineticConstants& k,
                                    const Environment& pool_env, const LightSignal& signal, const FdmConfig& cfg);

/// Schedule from sampled C_H_in crossings (used by the FDM and tests).
CycleSchedule schedule_from_crossings(const Trajectory& traj, const LightSignal& signal);

}  // namespace vtx
