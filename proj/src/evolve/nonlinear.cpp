#include <cmath>
#include <stdexcept>
#include <vector>

#include "axivort/evolve.hpp"

namespace axivort::evolve {
namespace {

// Fromm face value between nodes k and k+1: upwind-biased, second order.
inline double fromm(double vm, double v0, double v1, double v2, double u) {
  return u >= 0.0 ? v0 + 0.25 * (v1 - vm) : v1 - 0.25 * (v2 - v0);
}

}  // namespace

Field nonlinear_rhs_with(const Field& h, double t, const biot::Velocity& m) {
  const Grid& g = h.grid;
  if (!(m.m_r.grid == g) || !(m.m_z.grid == g)) throw std::invalid_argument("nonlinear_rhs: grid mismatch");
  const std::size_t nr = g.nr(), nz = g.nz(), cols = g.cols();
  const double dr = g.dr(), dz = g.dz();
  const double damp = std::exp(-t);

  // P_{i+1/2, j} = r_{i+1/2}^2 h m_r at radial faces, zero at the first and last face.
  std::vector<double> P(nr * cols, 0.0);
  for (std::size_t i = 1; i + 1 < nr; ++i) {
    const double rf = g.r(i) + 0.5 * dr;
    for (std::size_t j = 1; j < nz; ++j) {
      const double u = 0.5 * (m.m_r(i, j) + m.m_r(i + 1, j));
      P[i * cols + j] = rf * rf * u * fromm(h(i - 1, j), h(i, j), h(i + 1, j), h(i + 2, j), u);
    }
  }
  // Q_{i, j+1/2} = h m_z at axial faces.
  std::vector<double> Q(g.rows() * nz, 0.0);
  for (std::size_t i = 1; i < nr; ++i)
    for (std::size_t j = 1; j + 1 < nz; ++j) {
      const double u = 0.5 * (m.m_z(i, j) + m.m_z(i, j + 1));
      Q[i * nz + j] = u * fromm(h(i, j - 1), h(i, j), h(i, j + 1), h(i, j + 2), u);
    }

  Field out(g, FieldKind::vorticity_h);
  for (std::size_t i = 1; i < nr; ++i) {
    const double r = g.r(i);
    const double inv = 1.0 / (r * r * dr);
    for (std::size_t j = 1; j < nz; ++j) {
      const double div = (P[i * cols + j] - P[(i - 1) * cols + j]) * inv + (Q[i * nz + j] - Q[i * nz + j - 1]) / dz;
      out(i, j) = damp * (2.0 * m.m_r(i, j) * h(i, j) / r - div);
    }
  }
  return out;
}

Field nonlinear_rhs(const Field& h, double t, const biot::StreamSolver& solver, biot::Velocity* velocity) {
  biot::Velocity m = biot::velocity_from_stream(solver.solve(h));
  Field out = nonlinear_rhs_with(h, t, m);
  if (velocity != nullptr) *velocity = std::move(m);
  return out;
}

Field nonlinear_rhs(const Field& h, double t) { return nonlinear_rhs(h, t, biot::StreamSolver(h.grid)); }

}  // namespace axivort::evolve
