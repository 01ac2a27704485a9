#include <cmath>
#include <stdexcept>
#include <string>

#include "axivort/evolve.hpp"

namespace axivort::evolve {

std::string_view to_string(Preset preset) {
  switch (preset) {
    case Preset::scaled_attractor: return "scaled_attractor";
    case Preset::mode_perturbation: return "mode_perturbation";
    case Preset::custom: return "custom";
  }
  return "unknown";
}

Preset parse_preset(std::string_view text) {
  if (text == "scaled_attractor") return Preset::scaled_attractor;
  if (text == "mode_perturbation") return Preset::mode_perturbation;
  if (text == "custom") return Preset::custom;
  throw std::invalid_argument("unknown initial preset '" + std::string(text) + "'");
}

Field make_initial(const Grid& grid, const InitialDatum& datum, double* start_time) {
  if (start_time != nullptr) *start_time = 0.0;
  Field h;
  switch (datum.preset) {
    case Preset::scaled_attractor:
      h = sample(grid, FieldKind::vorticity_h, [&](double r, double z) { return datum.impulse * rho_star(r, z); });
      break;
    case Preset::mode_perturbation:
      h = sample(grid, FieldKind::vorticity_h, [&](double r, double z) {
        double f = datum.impulse;
        for (const ModeAmplitude& m : datum.modes) f += m.amplitude * basis::eigenfunction(m.idx, r, z);
        return f * rho_star(r, z);
      });
      break;
    case Preset::custom: {
      Checkpoint cp = read_checkpoint(datum.path);
      if (cp.field.kind != FieldKind::vorticity_h)
        throw std::invalid_argument("custom initial datum must be a vorticity_h checkpoint");
      if (!(cp.field.grid == grid)) throw std::invalid_argument("custom initial datum grid differs from configured grid");
      if (start_time != nullptr) *start_time = cp.time;
      h = std::move(cp.field);
      break;
    }
  }
  if (!h.all_finite()) throw std::domain_error("initial datum is not finite");
  apply_dirichlet(h);
  return h;
}

}  // namespace axivort::evolve
