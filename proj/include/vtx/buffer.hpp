#pragma once

namespace vtx {

/// H+ held by one compartment: free plus bound to the buffer ligand.
struct BufferedCompartment {
  double total_h = 0;          // mol
  double buffer_molarity = 0;  // B0, mol/m^3
  double dissociation = 0;     // k_a, mol/m^3
  double volume = 0;           // m^3
};

struct BufferEquilibrium {
  double c_h = 0;   // free H+, mol/m^3
  double c_hb = 0;  // complexed H+, mol/m^3
};

/// Mass-action split of total H+ concentration T into free C and complex:
/// the non-negative root of C^2 + C (B0 - T + k_a) - k_a T = 0.
BufferEquilibrium equilibrate(const BufferedCompartment& comp);
BufferEquilibrium equilibrate_concentration(double total_conc, double buffer_molarity, double dissociation);

/// Free + complexed concentration at free concentration c_h.
double total_concentration(double c_h, double buffer_molarity, double dissociation);

/// Attenuation of H+ flux by the buffer, k_a B0 (C_H + k_a)^-2, floored at 1.
double buffer_attenuation(double c_h, double buffer_molarity, double dissociation);

}  // namespace vtx
