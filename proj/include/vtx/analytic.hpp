#pragma once

#include "vtx/cycle_schedule.hpp"
#include "vtx/model.hpp"
#include "vtx/trajectory.hpp"

namespace vtx {

/// Coefficients of the linear H+ equation dC/dt = b' - a C for one phase.
/// The j_* fields are unattenuated; a(), b() and b_prime() divide by beta.
struct PhaseCoefficients {
  double j_l_a = 0;    // gamma_L (1/V_in + 1/V_out), 1/s
  double j_p_a = 0;    // gamma_P / (V_out C_H_out0), 1/s
  double j_l_b = 0;    // gamma_L N_H / (V_in V_out), mol/(m^3 s)
  double j_p_b = 0;    // gamma_P N_H / (V_out C_H_out0 V_in), mol/(m^3 s)
  double j_sym_b = 0;  // -gamma_Sym^H / V_in, mol/(m^3 s)
  double beta = 1;
  bool light = false;
  bool symport = false;

  double a() const;
  double b() const;
  double b_prime() const;
};

/// Coefficients for the given light/symport state with beta evaluated at the
/// phase-start concentration c_h_start.
PhaseCoefficients phase_coefficients(const DerivedRates& r, const Environment& env, bool light, bool symport,
                                     double c_h_start);

/// C_S_in after `elapsed` seconds of Michaelis-Menten symport from c_s_start.
double exact_substrate(double c_s_start, const DerivedRates& r, double elapsed);

/// C_H_in after `elapsed` seconds of a phase with coefficients `c`. When
/// c.symport is set, the substrate follows the exact law starting from
/// c_s_start at `s_offset` seconds of symport, and the H+ efflux integral
/// is evaluated by Gauss-Kronrod quadrature (SolverError if it does not
/// converge).
double exact_proton(double c_h_start, const PhaseCoefficients& c, const DerivedRates& r, double c_s_start,
                    double s_offset, double elapsed);

/// Linear substrate decrease with a clamp at zero.
double closed_form_substrate(double c_s_start, const DerivedRates& r, double elapsed);

/// b'/a + (C_start - b'/a) exp(-a elapsed).
double closed_form_proton(double c_h_start, const PhaseCoefficients& c, double elapsed);

enum class AnalyticMode { exact, closed };

struct AnalyticConfig {
  double dt_out = 1e-2;  // output grid spacing, s
  // Exact mode has no finite depletion instant; it is recorded when C_S_in
  // first falls to this fraction of its initial value.
  double depletion_fraction = 1e-3;

  void validate() const;
};

Trajectory run_analytic(const VesicleSpec& spec, const KineticConstants& k, const Environment& env,
                        const LightSignal& signal, AnalyticMode mode, const AnalyticConfig& cfg = {});

}  // namespace vtx
