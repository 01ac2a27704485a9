#include <cmath>
#include <stdexcept>

#include "axivort/field.hpp"

namespace axivort {

Grid::Grid(double r_max, double z_max, std::size_t nr, std::size_t nz)
    : r_max_(r_max), z_max_(z_max), nr_(nr), nz_(nz) {
  if (!(r_max > 0.0) || !(z_max > 0.0) || !std::isfinite(r_max) || !std::isfinite(z_max))
    throw std::invalid_argument("Grid: extents must be positive and finite");
  if (nr < 8 || nz < 8) throw std::invalid_argument("Grid: need at least 8 cells per direction");
}

double Grid::trapezoid_weight(std::size_t i, std::size_t j) const {
  double w = dr() * dz();
  if (i == 0 || i == nr_) w *= 0.5;
  if (j == 0 || j == nz_) w *= 0.5;
  return w;
}

std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::vorticity_h: return "vorticity_h";
    case FieldKind::relative_f: return "relative_f";
    case FieldKind::stream: return "stream";
    case FieldKind::velocity_r: return "velocity_r";
    case FieldKind::velocity_z: return "velocity_z";
  }
  return "unknown";
}

}  // namespace axivort
