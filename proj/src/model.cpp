#include "vtx/model.hpp"

#include <cmath>
#include <numbers>

#include "vtx/errors.hpp"
#include "vtx/units.hpp"

namespace vtx {

double VesicleSpec::inner_volume() const { return std::numbers::pi / 6.0 * d_in * d_in * d_in; }

double VesicleSpec::outer_area() const {
  const double d_out = d_in + 2.0 * d_mem;
  return std::numbers::pi * d_out * d_out;
}

void VesicleSpec::validate() const {
  if (!(d_in > 0)) throw ValidationError("vesicle.d_in", "must be > 0");
  if (!(d_mem > 0)) throw ValidationError("vesicle.d_mem", "must be > 0");
  if (!(n_pumps >= 0)) throw ValidationError("vesicle.n_pumps", "must be >= 0");
  if (!(n_symporters >= 0)) throw ValidationError("vesicle.n_symporters", "must be >= 0");
  if (!(permeability > 0)) throw ValidationError("vesicle.permeability", "must be > 0");
}

void KineticConstants::validate() const {
  if (!(pump_rate >= 0)) throw ValidationError("kinetics.pump_rate", "must be >= 0");
  if (!(symport_rate >= 0)) throw ValidationError("kinetics.symport_rate", "must be >= 0");
  if (!(stoichiometry > 0)) throw ValidationError("kinetics.stoichiometry", "must be > 0");
  if (!(michaelis_constant > 0)) throw ValidationError("kinetics.michaelis_constant", "must be > 0");
  if (!std::isfinite(threshold)) throw ValidationError("kinetics.threshold", "must be finite");
  if (!(avogadro > 0)) throw ValidationError("kinetics.avogadro", "must be > 0");
}

std::vector<std::string> Environment::validate(const VesicleSpec& spec) const {
  if (!(v_out > 0)) throw ValidationError("environment.v_out", "must be > 0");
  if (!(buffer_molarity >= 0)) throw ValidationError("environment.buffer_molarity", "must be >= 0");
  if (buffer_molarity > 0 && !(dissociation > 0)) {
    throw ValidationError("environment.dissociation", "must be > 0 when the medium is buffered");
  }
  if (!(c_h_in0 >= 0)) throw ValidationError("environment.c_h_in0", "must be >= 0");
  if (!(c_h_out0 > 0)) throw ValidationError("environment.c_h_out0", "must be > 0");
  if (!(c_s_in0 >= 0)) throw ValidationError("environment.c_s_in0", "must be >= 0");

  std::vector<std::string> warnings;
  const double v_in = spec.inner_volume();
  if (v_out < 100.0 * v_in) {
    warnings.push_back("V_out = " + units::format(v_out, units::Dimension::volume) + " is less than 100 V_in (" +
                       units::format(v_in, units::Dimension::volume) +
                       "); single-vesicle independence is questionable");
  }
  return warnings;
}

DerivedRates derive_rates(const VesicleSpec& spec, const KineticConstants& k, const Environment& env) {
  spec.validate();
  k.validate();
  DerivedRates r;
  r.warnings = env.validate(spec);

  r.v_in = spec.inner_volume();
  r.v_out = env.v_out;
  r.c_h_out0 = env.c_h_out0;
  r.michaelis_constant = k.michaelis_constant;
  r.stoichiometry = k.stoichiometry;
  r.mode = spec.mode;

  r.gamma_pump = k.pump_rate * spec.n_pumps / k.avogadro;
  r.gamma_sym_s = k.symport_rate * spec.n_symporters / k.avogadro;
  r.gamma_sym_h = k.stoichiometry * r.gamma_sym_s;
  r.gamma_leak = spec.permeability * spec.outer_area();

  r.n_h = env.c_h_in0 * r.v_in + env.c_h_out0 * r.v_out;
  r.n_s = env.c_s_in0 * r.v_in;
  r.c_switch = r.n_h / (r.v_out * std::pow(10.0, -k.threshold) + r.v_in);

  if (spec.n_pumps == 0 && spec.n_symporters == 0) {
    r.warnings.emplace_back("vesicle carries no pumps and no symporters; system is inert");
  }
  return r;
}

SystemState SystemState::initial(const Environment& env) {
  SystemState s;
  s.c_h_in = env.c_h_in0;
  s.c_h_out = env.c_h_out0;
  s.c_s_in = env.c_s_in0;
  s.c_s_out = 0.0;
  if (env.buffer_molarity > 0) {
    const double b0 = env.buffer_molarity;
    const double ka = env.dissociation;
    s.c_hb_in = b0 * s.c_h_in / (s.c_h_in + ka);
    s.c_hb_out = b0 * s.c_h_out / (s.c_h_out + ka);
  }
  return s;
}

double unbuffered_c_h_out(double c_h_in, const DerivedRates& r) { return (r.n_h - c_h_in * r.v_in) / r.v_out; }

double pump_flux(const SystemState& s, const DerivedRates& r, bool light_on) {
  if (!light_on || s.c_h_out <= 0) return 0.0;
  return s.c_h_out / r.c_h_out0 * r.gamma_pump;
}

SymportFlux symport_flux(const SystemState& s, const DerivedRates& r) {
  if (s.c_s_in <= 0 || s.c_h_in < r.c_switch) return {};
  const double j = r.gamma_sym_s * s.c_s_in / (s.c_s_in + r.michaelis_constant);
  return {j, r.stoichiometry * j};
}

double leakage_flux(const SystemState& s, const DerivedRates& r) { return r.gamma_leak * (s.c_h_in - s.c_h_out); }

double proton_net_influx(const SystemState& s, const DerivedRates& r, bool light_on) {
  const double net = pump_flux(s, r, light_on) - leakage_flux(s, r) - symport_flux(s, r).proton;
  return r.mode == TransporterMode::antiporter ? -net : net;
}

}  // namespace vtx
