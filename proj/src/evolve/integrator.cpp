#include <algorithm>
#include <cmath>
#include <sstream>

#include "axivort/errors.hpp"
#include "axivort/evolve.hpp"

namespace axivort::evolve {

Integrator::Integrator(const Grid& grid, double dt, bool nonlinear_on, double cfl, bool refresh_velocity)
    : op_(grid), cn_(op_, dt), solver_(grid), nonlinear_on_(nonlinear_on), cfl_(cfl), refresh_(refresh_velocity) {
  if (!(cfl > 0.0)) throw std::invalid_argument("Integrator: cfl must be positive");
}

Field Integrator::step(const Field& h, double t) {
  const Grid& g = op_.grid();
  const double dt = cn_.dt();
  Field base = cn_.explicit_half(h);
  if (!nonlinear_on_) {
    velocity_ = biot::velocity_from_stream(solver_.solve(h));
    courant_ = dt * std::exp(-t) * biot::velocity_sup(velocity_) / std::min(g.dr(), g.dz());
    cn_.solve_in_place(base);
    return base;
  }

  const Field n0 = nonlinear_rhs(h, t, solver_, &velocity_);
  courant_ = dt * std::exp(-t) * biot::velocity_sup(velocity_) / std::min(g.dr(), g.dz());
  if (!(courant_ <= cfl_)) {
    std::ostringstream msg;
    msg << "CFL violation at t=" << t << ": courant number " << courant_ << " exceeds " << cfl_;
    throw CflViolation(msg.str(), t, courant_);
  }

  Field stage = base;
  for (std::size_t k = 0; k < stage.values.size(); ++k) stage.values[k] += dt * n0.values[k];
  cn_.solve_in_place(stage);

  const Field n1 = refresh_ ? nonlinear_rhs(stage, t + dt, solver_) : nonlinear_rhs_with(stage, t + dt, velocity_);
  for (std::size_t k = 0; k < base.values.size(); ++k) base.values[k] += 0.5 * dt * (n0.values[k] + n1.values[k]);
  cn_.solve_in_place(base);
  return base;
}

Field step(const Field& h, double t, double dt, bool nonlinear_on) {
  Integrator integ(h.grid, dt, nonlinear_on);
  return integ.step(h, t);
}

}  // namespace axivort::evolve
