#pragma once

#include <string>
#include <vector>

namespace vtx {

enum class TransporterMode { symporter, antiporter };

/// Geometry, protein inventory and H+ permeability of one vesicle.
///
/// Protein counts are integral for sampled vesicles. They are stored as
/// doubles so that a mean-parameter reference vesicle can carry fractional
/// expectations.
struct VesicleSpec {
  double d_in = 87e-9;            // inner diameter, m
  double d_mem = 14e-9;           // membrane thickness, m
  double n_pumps = 40;            // light-driven H+ pumps
  double n_symporters = 30;       // H+/substrate co-transporters
  double permeability = 3e-6;     // membrane H+ permeability coefficient, m/s
  TransporterMode mode = TransporterMode::symporter;

  /// (pi/6) d_in^3
  double inner_volume() const;
  /// Outer surface pi (d_in + 2 d_mem)^2, used for leakage.
  double outer_area() const;

  void validate() const;
};

struct KineticConstants {
  double pump_rate = 0.03;          // per-pump H+ rate, 1/s
  double symport_rate = 0.006;      // per-symporter substrate rate, 1/s
  double stoichiometry = 3;         // H+ per substrate molecule
  double michaelis_constant = 1.3e-2;  // mol/m^3
  double threshold = 0.015;         // log10 H+ ratio needed to activate symport
  double avogadro = 6.022e23;       // 1/mol

  void validate() const;
};

/// Extravesicular compartment of one single-vesicle system plus initial state.
struct Environment {
  double v_out = 1e-17;         // m^3
  double buffer_molarity = 20;  // B0, mol/m^3, present in both compartments
  double dissociation = 6.2e-5; // k_a, mol/m^3
  double c_h_in0 = 3.98e-5;     // free H+, mol/m^3
  double c_h_out0 = 3.98e-5;
  double c_s_in0 = 300;         // substrate, mol/m^3

  /// Throws on violated invariants; returns warnings (e.g. V_out < 100 V_in).
  std::vector<std::string> validate(const VesicleSpec& spec) const;
};

/// Rates and inventories of one single-vesicle system. Carries the volumes
/// and constants the flux laws need so they can be evaluated standalone.
struct DerivedRates {
  double gamma_pump = 0;       // mol/s
  double gamma_sym_s = 0;      // mol/s
  double gamma_sym_h = 0;      // mol/s
  double gamma_leak = 0;       // m^3/s
  double n_h = 0;              // free H+ inventory at t=0, mol
  double n_s = 0;              // substrate inventory, mol
  double c_switch = 0;         // symport activation threshold, mol/m^3

  double v_in = 0;
  double v_out = 0;
  double c_h_out0 = 0;
  double michaelis_constant = 0;
  double stoichiometry = 0;
  TransporterMode mode = TransporterMode::symporter;

  std::vector<std::string> warnings;
};

DerivedRates derive_rates(const VesicleSpec& spec, const KineticConstants& k, const Environment& env);

/// Free concentrations of one single-vesicle system at time t.
struct SystemState {
  double t = 0;
  double c_h_in = 0;
  double c_h_out = 0;
  double c_s_in = 0;
  double c_s_out = 0;
  double c_hb_in = 0;   // buffer complex; zero when unbuffered
  double c_hb_out = 0;

  /// Initial state with complexes at buffer equilibrium.
  static SystemState initial(const Environment& env);
};

/// H+ outside from unbuffered free-H+ conservation.
double unbuffered_c_h_out(double c_h_in, const DerivedRates& r);

/// Light-driven H+ influx, mol/s.
double pump_flux(const SystemState& s, const DerivedRates& r, bool light_on);

struct SymportFlux {
  double substrate = 0;  // mol/s, outward
  double proton = 0;     // mol/s, outward
};

/// Michaelis-Menten co-transport, gated by C_H_in >= C_switch.
SymportFlux symport_flux(const SystemState& s, const DerivedRates& r);

/// gamma_L (C_H_in - C_H_out); positive is outward.
double leakage_flux(const SystemState& s, const DerivedRates& r);

/// Net H+ gain of the intravesicular volume, mol/s. Antiporter mode flips
/// the sign of all three terms.
double proton_net_influx(const SystemState& s, const DerivedRates& r, bool light_on);

}  // namespace vtx
