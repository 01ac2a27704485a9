#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "axivort/asymptotics.hpp"

namespace axivort::asymptotics {

HardyReport hardy_check(const Sampler& psi, std::size_t K) {
  const basis::Quadrature profile = basis::build_profile_quadrature(K);
  const basis::Quadrature mu = basis::build_quadrature(K);
  const double a = profile.integrate([&](double r, double z) {
    const double v = psi.value(r, z);
    return v * v;
  });
  const double b = mu.integrate([&](double r, double z) {
    const double v = psi.value(r, z);
    return v * v;
  });
  const double c = mu.integrate([&](double r, double z) {
    const double v = psi.d_r(r, z);
    return v * v;
  });
  HardyReport rep;
  rep.lhs = std::sqrt(a);
  rep.rhs = std::sqrt(b) + std::sqrt(c);
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : INFINITY;
  return rep;
}

double gronwall_oracle(double lambda, double mu, double C, double F0, GronwallVariant variant) {
  if (!(lambda >= 0.0) || C < 0.0 || F0 < 0.0)
    throw std::invalid_argument("gronwall_oracle: need lambda >= 0, C >= 0, F0 >= 0");
  if (variant == GronwallVariant::b && !(lambda < mu))
    throw std::invalid_argument("gronwall_oracle: variant b needs lambda < mu");
  const double kappa = variant == GronwallVariant::b ? mu : lambda;
  auto rhs = [&](double t, double F) { return -(lambda - C * std::exp(-t)) * F + C * std::exp(-kappa * t); };
  auto scaled = [&](double t, double F) {
    const double v = F * std::exp(lambda * t);
    return variant == GronwallVariant::b ? v : v / (1.0 + t);
  };
  constexpr double dt = 1e-3;
  constexpr int steps = 30000;
  double F = F0, sup = scaled(0.0, F0);
  for (int n = 0; n < steps; ++n) {
    const double t = n * dt;
    const double k1 = rhs(t, F);
    const double k2 = rhs(t + 0.5 * dt, F + 0.5 * dt * k1);
    const double k3 = rhs(t + 0.5 * dt, F + 0.5 * dt * k2);
    const double k4 = rhs(t + dt, F + dt * k3);
    F += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    sup = std::max(sup, scaled(t + dt, F));
  }
  return sup;
}

IbpIdentity ibp_identity(const biot::Velocity& m, const Sampler& g, const Sampler& f) {
  const Grid& grid = m.m_r.grid;
  IbpIdentity out;
  for (std::size_t i = 1; i < grid.nr(); ++i) {
    const double r = grid.r(i);
    for (std::size_t j = 1; j < grid.nz(); ++j) {
      const double z = grid.z(j);
      const double w = grid.dr() * grid.dz() * r * r * rho_star(r, z);
      const double mr = m.m_r(i, j), mz = m.m_z(i, j);
      const double gv = g.value(r, z), fv = f.value(r, z);
      out.lhs += w * (0.5 * gv * (r * mr + z * mz) * fv - gv * (mr * f.d_r(r, z) + mz * f.d_z(r, z)));
      out.rhs += w * ((g.d_r(r, z) * mr + g.d_z(r, z) * mz) * fv + 2.0 * (mr / r) * gv * fv);
    }
  }
  return out;
}

PoincareCheck poincare_check(const Coefficients& f) {
  PoincareCheck out;
  for (const auto& [idx, c] : f) {
    if (idx == EigenIndex{0, 0}) continue;
    out.lhs += 0.5 * c * c;
    out.rhs += basis::eigenvalue(idx).value() * c * c;
  }
  return out;
}

}  // namespace axivort::asymptotics
