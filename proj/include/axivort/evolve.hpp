#pragma once

// Time integration of the self-similar vorticity equation
//   d_t h = Lap h + (1/r) d_r h + (1/2)(r, z).grad h + 2h - h/r^2
//           + e^{-t} ((1/r) m_r h - m.grad h)
// on a truncated grid with h = 0 on the axis and the outer boundary.
//
// The linear part is discretized in the conservative form
//   r^2 L h = d_r(r^3 e^{-r^2/4} d_r(e^{r^2/4} h / r)) + r^2 d_z(e^{-z^2/4} d_z(e^{z^2/4} h)),
// so rho_* is an exact discrete steady state, the trapezoid impulse is
// conserved, and L is self-adjoint for the discrete mu inner product. The
// nonlinearity is written as 2 m_r h / r - r^-2 div(r^2 h m).

#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "axivort/basis.hpp"
#include "axivort/biot.hpp"
#include "axivort/field.hpp"
#include "axivort/simd/tridiagonal.hpp"

namespace axivort::evolve {

/// Separable linear operator L = A_r (+) A_z acting on interior nodes.
class LinearOperator {
 public:
  explicit LinearOperator(const Grid& grid);

  const Grid& grid() const { return grid_; }

  /// L h at interior nodes; boundary values of the result are zero.
  Field apply(const Field& h) const;

  // Three-point coefficients indexed by node (i over 0..nr, j over 0..nz);
  // only interior entries are meaningful.
  const std::vector<double>& r_lower() const { return rl_; }
  const std::vector<double>& r_diag() const { return rd_; }
  const std::vector<double>& r_upper() const { return ru_; }
  const std::vector<double>& z_lower() const { return zl_; }
  const std::vector<double>& z_diag() const { return zd_; }
  const std::vector<double>& z_upper() const { return zu_; }

  /// Symmetrizing scale p_i with P A_r P^-1 symmetric (interior nodes).
  const std::vector<double>& r_scale() const { return pr_; }
  /// Symmetrizing scale q_j with Q A_z Q^-1 symmetric (interior nodes).
  const std::vector<double>& z_scale() const { return pz_; }

  /// Symmetric radial matrix (size nr-1): diagonal and first off-diagonal.
  std::vector<double> r_sym_diag() const;
  std::vector<double> r_sym_off() const;
  /// Symmetric axial matrix (size nz-1): diagonal and first off-diagonal.
  std::vector<double> z_sym_diag() const;
  std::vector<double> z_sym_off() const;

 private:
  Grid grid_;
  std::vector<double> rl_, rd_, ru_, zl_, zd_, zu_, pr_, pz_;
};

/// linear_rhs(h) = L h with a freshly built operator.
Field linear_rhs(const Field& h);

/// Crank-Nicolson factors for a fixed dt. The implicit solve diagonalizes A_z
/// with a dense eigenbasis and runs one tridiagonal solve in r per z-mode.
class CrankNicolson {
 public:
  CrankNicolson(const LinearOperator& op, double dt);

  double dt() const { return dt_; }

  /// (I + dt/2 L) h, boundary zero.
  Field explicit_half(const Field& h) const;

  /// Overwrites interior values of rhs with (I - dt/2 L)^-1 rhs and zeroes
  /// the boundary.
  void solve_in_place(Field& rhs) const;

 private:
  const LinearOperator* op_;
  double dt_;
  std::size_t I_ = 0, J_ = 0;
  std::vector<double> fwd_, bwd_;  // J x J row-major
  std::vector<double> lambda_z_;
  simd::TridiagonalBatch thomas_;
  mutable std::vector<double> work_a_, work_b_;
};

/// Eigenvectors of the discrete operator, tensorized as
/// phi_{l,n}(i, j) = radial_l(i) axial_n(j) in the variable f = h / rho_*.
/// They are orthonormal for the weights dr dz r_i^2 rho_*(r_i, z_j) and their
/// signs agree with the continuum eigenfunctions.
class DiscreteModes {
 public:
  DiscreteModes(const LinearOperator& op, unsigned max_ell, unsigned max_n);

  unsigned max_ell() const { return max_ell_; }
  unsigned max_n() const { return max_n_; }

  /// Positive decay rate of mode (l, n) under the semi-discrete flow.
  double rate(basis::EigenIndex idx) const;
  /// Rate seen by Crank-Nicolson with step dt: log((1 + a)/(1 - a)) / dt, a = rate dt/2.
  double cn_rate(basis::EigenIndex idx, double dt) const;

  double radial(unsigned ell, std::size_t i) const { return radial_[ell][i]; }
  double axial(unsigned n, std::size_t j) const { return axial_[n][j]; }

  /// <h / rho_*, phi_idx> with the discrete weights.
  double project(const Field& h, basis::EigenIndex idx) const;
  /// Same for several modes, sharing the radial contractions.
  std::vector<double> project_all(const Field& h, const std::vector<basis::EigenIndex>& modes) const;

  /// h = rho_* phi_idx sampled on the grid.
  Field mode_field(basis::EigenIndex idx) const;

 private:
  Grid grid_;
  unsigned max_ell_, max_n_;
  std::vector<std::vector<double>> radial_, axial_;
  std::vector<double> rate_r_, rate_z_;
};

/// Face-flux nonlinear term times e^{-t}. Uses `solver` for the velocity and
/// returns it through `velocity` when non-null.
Field nonlinear_rhs(const Field& h, double t, const biot::StreamSolver& solver,
                    biot::Velocity* velocity = nullptr);
Field nonlinear_rhs(const Field& h, double t);

/// Nonlinear term for a given velocity (no elliptic solve).
Field nonlinear_rhs_with(const Field& h, double t, const biot::Velocity& m);

enum class Preset { scaled_attractor, mode_perturbation, custom };

std::string_view to_string(Preset preset);
Preset parse_preset(std::string_view text);

struct ModeAmplitude {
  basis::EigenIndex idx;
  double amplitude = 0.0;
};

struct InitialDatum {
  Preset preset = Preset::scaled_attractor;
  double impulse = 1.0;
  std::vector<ModeAmplitude> modes;
  std::string path;
};

/// h0 on the grid with Dirichlet boundaries imposed. For `custom` the
/// checkpoint must hold a vorticity_h field on the same grid; its time is
/// returned through start_time when non-null.
Field make_initial(const Grid& grid, const InitialDatum& datum, double* start_time = nullptr);

struct EvolveConfig {
  Grid grid{12.0, 12.0, 256, 256};
  double dt = 2e-3;
  double t_end = 10.0;
  bool nonlinear_on = true;
  /// Store a checkpoint every this many steps (0: only initial and final).
  std::size_t checkpoint_every = 0;
  double cfl = 0.5;
  /// Recompute the velocity for the second Heun stage. When false the stage
  /// reuses the first velocity and the nonlinear term is first-order in time.
  bool refresh_velocity = true;
  /// Trace every mode with level <= trace_level (eigenvalue <= trace_level / 2).
  unsigned trace_level = 8;
  InitialDatum initial;
};

/// One IMEX step: Crank-Nicolson on L, Heun on the nonlinear term.
class Integrator {
 public:
  Integrator(const Grid& grid, double dt, bool nonlinear_on, double cfl = 0.5, bool refresh_velocity = true);
  Integrator(const Integrator&) = delete;
  Integrator& operator=(const Integrator&) = delete;

  const LinearOperator& op() const { return op_; }
  const biot::StreamSolver& stream_solver() const { return solver_; }
  double dt() const { return cn_.dt(); }

  /// Advances h from t to t + dt. Throws CflViolation when
  /// dt e^{-t} |m|_inf > cfl min(dr, dz).
  Field step(const Field& h, double t);

  /// Velocity of the state passed to the last step().
  const biot::Velocity& last_velocity() const { return velocity_; }
  double last_courant() const { return courant_; }

 private:
  LinearOperator op_;
  CrankNicolson cn_;
  biot::StreamSolver solver_;
  bool nonlinear_on_;
  double cfl_;
  bool refresh_;
  biot::Velocity velocity_;
  double courant_ = 0.0;
};

/// Single step with a throwaway integrator.
Field step(const Field& h, double t, double dt, bool nonlinear_on = true);

struct Trajectory {
  std::vector<basis::EigenIndex> modes;
  std::vector<double> times;
  std::vector<double> impulse;
  /// coef[k][m]: continuum projection <f, psi_m>_mu at times[k] by grid integration.
  std::vector<std::vector<double>> coef;
  /// dcoef[k][m]: projection on the discrete eigenvector of mode m.
  std::vector<std::vector<double>> dcoef;
  std::vector<double> l2mu_residual;  // ||f - <f>||_{L^2(mu)}
  std::vector<double> m_inf;
  std::vector<double> checkpoint_times;
  std::vector<Field> checkpoints;
  double dt = 0.0;
  /// Decay rates of the traced modes seen by the scheme (see DiscreteModes::cn_rate).
  std::vector<double> discrete_rates;

  std::size_t mode_index(basis::EigenIndex idx) const;
  std::vector<double> coef_series(basis::EigenIndex idx) const;
  std::vector<double> dcoef_series(basis::EigenIndex idx) const;
};

/// Columns t, impulse, coef_<l>_<n>..., l2mu_residual, m_inf, dcoef_<l>_<n>...
void write_trace_csv(std::ostream& out, const Trajectory& traj);

/// Carries the trajectory recorded before a step failed.
class RunAborted : public std::runtime_error {
 public:
  RunAborted(const std::string& what, Trajectory partial, std::exception_ptr cause)
      : std::runtime_error(what), partial_(std::move(partial)), cause_(cause) {}
  const Trajectory& partial() const { return partial_; }
  std::exception_ptr cause() const { return cause_; }

 private:
  Trajectory partial_;
  std::exception_ptr cause_;
};

/// Observer invoked after each stored checkpoint (time, field).
using CheckpointSink = std::function<void(double, const Field&)>;

/// Integrates from the initial datum to t_end, recording traces every step.
/// Throws RunAborted (holding the partial trajectory) if a step fails.
Trajectory run(const EvolveConfig& config, const CheckpointSink& sink = {});

}  // namespace axivort::evolve
