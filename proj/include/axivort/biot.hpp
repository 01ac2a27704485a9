#pragma once

// Velocity recovery from vorticity through the axisymmetric streamfunction:
//   d_rr Psi - (1/r) d_r Psi + d_zz Psi = -r h,   Psi = 0 on the boundary,
//   m_r = -(1/r) d_z Psi,   m_z = (1/r) d_r Psi.
//
// The radial part is discretized in conservation form, r d_r((1/r) d_r Psi),
// with face radii r_{i+1/2}. The problem is diagonalized in z by a type-I
// sine transform and each wavenumber is a tridiagonal solve in r.

#include <memory>

#include "axivort/field.hpp"

namespace axivort::biot {

class StreamSolver {
 public:
  /// Throws std::invalid_argument if the grid has fewer than 3 radial cells.
  explicit StreamSolver(const Grid& grid, double solver_tol = 1e-10);
  ~StreamSolver();
  StreamSolver(StreamSolver&&) noexcept;
  StreamSolver& operator=(StreamSolver&&) noexcept;

  const Grid& grid() const;
  double solver_tol() const;

  /// Returns Psi. Throws SolverError if the relative discrete L^2 residual
  /// exceeds solver_tol.
  Field solve(const Field& h) const;

  /// Relative residual ||E Psi + r h|| / ||r h|| of the last solve.
  double last_residual() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around StreamSolver.
Field solve_stream(const Field& h, double solver_tol = 1e-10);

/// Discrete operator E Psi at interior nodes (zero elsewhere).
Field apply_stream_operator(const Field& psi);

struct Velocity {
  Field m_r;
  Field m_z;
};

/// Central differences in the interior, second-order one-sided differences on
/// the outer boundary. On the axis m_r = 0 and m_z is extrapolated from the
/// first two interior rows as a + b r^2 (Psi = O(r^2) there).
Velocity velocity_from_stream(const Field& psi);

/// Largest pointwise |m|.
double velocity_sup(const Velocity& m);

struct VelocityBound {
  double m_sup = 0.0;
  double interpolation = 0.0;  // ||h||_1^{1/2} ||h||_inf^{1/2}
  double ratio = 0.0;          // 0 when interpolation vanishes
};

VelocityBound velocity_bound_check(const Field& h, const Velocity& m);

struct AnelasticResidual {
  /// Centered nodal d_r(r m_r) + d_z(r m_z); vanishes identically for
  /// velocities built from a streamfunction by central differences.
  double nodal_max = 0.0;
  /// Cell-centred (box) divergence, which carries the O(dr^2 + dz^2) error.
  double box_max = 0.0;
};

AnelasticResidual anelastic_residual(const Velocity& m);

/// d_z m_r - d_r m_z by central differences at interior nodes.
Field curl(const Velocity& m);

}  // namespace axivort::biot
