#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "axivort/biot.hpp"
#include "axivort/errors.hpp"
#include "axivort/simd/tridiagonal.hpp"

namespace axivort::biot {

struct StreamSolver::Impl {
  Grid grid;
  double tol = 1e-10;
  std::size_t I = 0;  // interior radial nodes 1..nr-1
  std::size_t J = 0;  // interior axial nodes 1..nz-1
  double* buffer = nullptr;
  fftw_plan plan = nullptr;
  simd::TridiagonalBatch thomas;
  mutable double last_residual = 0.0;

  ~Impl() {
    if (plan != nullptr) fftw_destroy_plan(plan);
    if (buffer != nullptr) fftw_free(buffer);
  }
};

StreamSolver::StreamSolver(const Grid& grid, double solver_tol) : impl_(std::make_unique<Impl>()) {
  if (grid.nr() < 3) throw std::invalid_argument("StreamSolver: need at least 3 radial cells");
  Impl& s = *impl_;
  s.grid = grid;
  s.tol = solver_tol;
  s.I = grid.nr() - 1;
  s.J = grid.nz() - 1;
  s.buffer = static_cast<double*>(fftw_malloc(sizeof(double) * s.I * s.J));
  if (s.buffer == nullptr) throw std::bad_alloc();
  const int n = static_cast<int>(s.J);
  const fftw_r2r_kind kind = FFTW_RODFT00;
  s.plan = fftw_plan_many_r2r(1, &n, static_cast<int>(s.I), s.buffer, nullptr, 1, n, s.buffer, nullptr, 1, n,
                              &kind, FFTW_ESTIMATE);
  if (s.plan == nullptr) throw std::runtime_error("StreamSolver: FFTW planning failed");

  const double dr = grid.dr(), dz = grid.dz();
  const double idr2 = 1.0 / (dr * dr);
  std::vector<double> lower(s.I), upper(s.I), diag(s.I * s.J);
  for (std::size_t a = 0; a < s.I; ++a) {
    const double r = grid.r(a + 1);
    const double inv_minus = 1.0 / (r - 0.5 * dr);
    const double inv_plus = 1.0 / (r + 0.5 * dr);
    lower[a] = inv_minus * idr2;
    upper[a] = inv_plus * idr2;
    for (std::size_t k = 0; k < s.J; ++k) {
      const double sn = std::sin(std::numbers::pi * static_cast<double>(k + 1) / (2.0 * static_cast<double>(s.J + 1)));
      const double kappa = -4.0 * sn * sn / (dz * dz);
      diag[a * s.J + k] = -(inv_minus + inv_plus) * idr2 + kappa / r;
    }
  }
  s.thomas = simd::TridiagonalBatch(s.I, s.J, s.J, lower, diag, upper);
}

StreamSolver::~StreamSolver() = default;
StreamSolver::StreamSolver(StreamSolver&&) noexcept = default;
StreamSolver& StreamSolver::operator=(StreamSolver&&) noexcept = default;

const Grid& StreamSolver::grid() const { return impl_->grid; }
double StreamSolver::solver_tol() const { return impl_->tol; }
double StreamSolver::last_residual() const { return impl_->last_residual; }

Field StreamSolver::solve(const Field& h) const {
  const Impl& s = *impl_;
  if (!(h.grid == s.grid)) throw std::invalid_argument("StreamSolver::solve: grid mismatch");
  const std::size_t cols = s.grid.cols();
  // Divided by r, the radial operator is symmetric: (E/r) Psi = -h.
  for (std::size_t a = 0; a < s.I; ++a)
    for (std::size_t k = 0; k < s.J; ++k) s.buffer[a * s.J + k] = -h(a + 1, k + 1);
  fftw_execute(s.plan);
  s.thomas.solve(s.buffer);
  fftw_execute(s.plan);

  Field psi(s.grid, FieldKind::stream);
  const double scale = 1.0 / (2.0 * static_cast<double>(s.J + 1));
  for (std::size_t a = 0; a < s.I; ++a) {
    double* row = psi.values.data() + (a + 1) * cols + 1;
    for (std::size_t k = 0; k < s.J; ++k) row[k] = scale * s.buffer[a * s.J + k];
  }

  const Field e = apply_stream_operator(psi);
  double res2 = 0.0, ref2 = 0.0;
  for (std::size_t i = 1; i < s.grid.nr(); ++i) {
    const double r = s.grid.r(i);
    for (std::size_t j = 1; j < s.grid.nz(); ++j) {
      const double rh = r * h(i, j);
      const double d = e(i, j) + rh;
      res2 += d * d;
      ref2 += rh * rh;
    }
  }
  s.last_residual = ref2 > 0.0 ? std::sqrt(res2 / ref2) : std::sqrt(res2);
  if (!(s.last_residual <= s.tol)) throw SolverError("solve_stream: residual above tolerance", s.last_residual);
  return psi;
}

Field solve_stream(const Field& h, double solver_tol) { return StreamSolver(h.grid, solver_tol).solve(h); }

Field apply_stream_operator(const Field& psi) {
  const Grid& g = psi.grid;
  const double dr = g.dr(), dz = g.dz();
  const double idr2 = 1.0 / (dr * dr), idz2 = 1.0 / (dz * dz);
  Field out(g, FieldKind::stream);
  for (std::size_t i = 1; i < g.nr(); ++i) {
    const double r = g.r(i);
    const double cm = r / (r - 0.5 * dr) * idr2;
    const double cp = r / (r + 0.5 * dr) * idr2;
    for (std::size_t j = 1; j < g.nz(); ++j) {
      out(i, j) = cp * (psi(i + 1, j) - psi(i, j)) - cm * (psi(i, j) - psi(i - 1, j)) +
                  (psi(i, j + 1) - 2.0 * psi(i, j) + psi(i, j - 1)) * idz2;
    }
  }
  return out;
}

}  // namespace axivort::biot
