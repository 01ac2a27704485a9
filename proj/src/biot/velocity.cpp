#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "axivort/biot.hpp"

namespace axivort::biot {

Velocity velocity_from_stream(const Field& psi) {
  const Grid& g = psi.grid;
  const std::size_t nr = g.nr(), nz = g.nz();
  const double dr = g.dr(), dz = g.dz();
  Velocity m{Field(g, FieldKind::velocity_r), Field(g, FieldKind::velocity_z)};

  for (std::size_t i = 1; i <= nr; ++i) {
    const double inv_r = 1.0 / g.r(i);
    for (std::size_t j = 0; j <= nz; ++j) {
      double dpz;
      if (j == 0)
        dpz = (-3.0 * psi(i, 0) + 4.0 * psi(i, 1) - psi(i, 2)) / (2.0 * dz);
      else if (j == nz)
        dpz = (3.0 * psi(i, nz) - 4.0 * psi(i, nz - 1) + psi(i, nz - 2)) / (2.0 * dz);
      else
        dpz = (psi(i, j + 1) - psi(i, j - 1)) / (2.0 * dz);
      double dpr;
      if (i == nr)
        dpr = (3.0 * psi(nr, j) - 4.0 * psi(nr - 1, j) + psi(nr - 2, j)) / (2.0 * dr);
      else
        dpr = (psi(i + 1, j) - psi(i - 1, j)) / (2.0 * dr);
      m.m_r(i, j) = -dpz * inv_r;
      m.m_z(i, j) = dpr * inv_r;
    }
  }
  // m_z is even in r: extrapolate quadratically in r^2 from rows 1 and 2,
  // which in terms of Psi reads (Psi_1 + 8 Psi_2 - Psi_3) / (12 dr^2).
  for (std::size_t j = 0; j <= nz; ++j) {
    m.m_r(0, j) = 0.0;
    m.m_z(0, j) = (4.0 * m.m_z(1, j) - m.m_z(2, j)) / 3.0;
  }
  return m;
}

double velocity_sup(const Velocity& m) {
  double s = 0.0;
  for (std::size_t k = 0; k < m.m_r.values.size(); ++k)
    s = std::max(s, std::hypot(m.m_r.values[k], m.m_z.values[k]));
  return s;
}

VelocityBound velocity_bound_check(const Field& h, const Velocity& m) {
  if (!(h.grid == m.m_r.grid) || !(h.grid == m.m_z.grid))
    throw std::invalid_argument("velocity_bound_check: fields on different grids");
  VelocityBound b;
  b.m_sup = velocity_sup(m);
  b.interpolation = std::sqrt(norm_lp_H(h, 1.0) * norm_lp_H(h, std::numeric_limits<double>::infinity()));
  b.ratio = b.interpolation > 0.0 ? b.m_sup / b.interpolation : 0.0;
  return b;
}

AnelasticResidual anelastic_residual(const Velocity& m) {
  const Grid& g = m.m_r.grid;
  const double dr = g.dr(), dz = g.dz();
  auto fr = [&](std::size_t i, std::size_t j) { return g.r(i) * m.m_r(i, j); };
  auto fz = [&](std::size_t i, std::size_t j) { return g.r(i) * m.m_z(i, j); };
  AnelasticResidual out;
  for (std::size_t i = 1; i < g.nr(); ++i)
    for (std::size_t j = 1; j < g.nz(); ++j) {
      const double d = (fr(i + 1, j) - fr(i - 1, j)) / (2.0 * dr) + (fz(i, j + 1) - fz(i, j - 1)) / (2.0 * dz);
      out.nodal_max = std::max(out.nodal_max, std::abs(d));
    }
  for (std::size_t i = 0; i < g.nr(); ++i)
    for (std::size_t j = 0; j < g.nz(); ++j) {
      const double d = (fr(i + 1, j) + fr(i + 1, j + 1) - fr(i, j) - fr(i, j + 1)) / (2.0 * dr) +
                       (fz(i, j + 1) + fz(i + 1, j + 1) - fz(i, j) - fz(i + 1, j)) / (2.0 * dz);
      out.box_max = std::max(out.box_max, std::abs(d));
    }
  return out;
}

Field curl(const Velocity& m) {
  const Grid& g = m.m_r.grid;
  const double dr = g.dr(), dz = g.dz();
  Field out(g, FieldKind::vorticity_h);
  for (std::size_t i = 1; i < g.nr(); ++i)
    for (std::size_t j = 1; j < g.nz(); ++j)
      out(i, j) = (m.m_r(i, j + 1) - m.m_r(i, j - 1)) / (2.0 * dz) - (m.m_z(i + 1, j) - m.m_z(i - 1, j)) / (2.0 * dr);
  return out;
}

}  // namespace axivort::biot
