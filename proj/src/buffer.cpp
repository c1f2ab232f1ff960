#include "vtx/buffer.hpp"

#include <algorithm>
#include <cmath>

namespace vtx {

BufferEquilibrium equilibrate_concentration(double total_conc, double buffer_molarity, double dissociation) {
  if (total_conc <= 0) return {};
  if (buffer_molarity <= 0) return {total_conc, 0.0};
  const double p = buffer_molarity - total_conc + dissociation;
  const double q = dissociation * total_conc;
  const double disc = std::sqrt(p * p + 4.0 * q);
  // Pick the cancellation-free form of the positive root.
  double c = p > 0 ? 2.0 * q / (p + disc) : 0.5 * (disc - p);
  c = std::clamp(c, 0.0, total_conc);
  return {c, total_conc - c};
}

BufferEquilibrium equilibrate(const BufferedCompartment& comp) {
  return equilibrate_concentration(comp.total_h / comp.volume, comp.buffer_molarity, comp.dissociation);
}

double total_concentration(double c_h, double buffer_molarity, double dissociation) {
  if (buffer_molarity <= 0) return c_h;
  return c_h + buffer_molarity * c_h / (c_h + dissociation);
}

double buffer_attenuation(double c_h, double buffer_molarity, double dissociation) {
  if (buffer_molarity <= 0) return 1.0;
  const double s = c_h + dissociation;
  return std::max(1.0, dissociation * buffer_molarity / (s * s));
}

}  // namespace vtx
