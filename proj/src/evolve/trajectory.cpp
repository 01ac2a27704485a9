#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "axivort/errors.hpp"
#include "axivort/evolve.hpp"

namespace axivort::evolve {
namespace {

// Separable tables for grid projections on the continuum eigenfunctions.
class ContinuumProjector {
 public:
  ContinuumProjector(const Grid& g, unsigned max_ell, unsigned max_n) : g_(g) {
    radial_.assign(max_ell + 1, std::vector<double>(g.rows(), 0.0));
    axial_.assign(max_n + 1, std::vector<double>(g.cols(), 0.0));
    for (unsigned ell = 0; ell <= max_ell; ++ell)
      for (std::size_t i = 0; i < g.rows(); ++i) {
        const basis::EigenIndex idx{ell, 0};
        radial_[ell][i] = basis::sign_convention(idx) * basis::normalization(idx) *
                          basis::laguerre(ell, 1.0, 0.25 * g.r(i) * g.r(i));
      }
    for (unsigned n = 0; n <= max_n; ++n)
      for (std::size_t j = 0; j < g.cols(); ++j)
        axial_[n][j] = basis::normalization({0, n}) * basis::hermite(n, 0.5 * g.z(j));
  }

  std::vector<double> project(const Field& h, const std::vector<basis::EigenIndex>& modes) const {
    const std::size_t L = radial_.size();
    std::vector<std::vector<double>> contracted(L, std::vector<double>(g_.cols(), 0.0));
    for (std::size_t i = 1; i < g_.nr(); ++i) {
      const double w = g_.dr() * g_.r(i) * g_.r(i);
      for (std::size_t ell = 0; ell < L; ++ell) {
        const double c = w * radial_[ell][i];
        for (std::size_t j = 1; j < g_.nz(); ++j) contracted[ell][j] += c * h(i, j);
      }
    }
    std::vector<double> out;
    for (const auto& m : modes) {
      double s = 0.0;
      for (std::size_t j = 1; j < g_.nz(); ++j) s += contracted[m.ell][j] * axial_[m.n][j];
      out.push_back(s * g_.dz());
    }
    return out;
  }

 private:
  Grid g_;
  std::vector<std::vector<double>> radial_, axial_;
};

double l2mu_residual(const Field& h, double mean, const std::vector<double>& rho) {
  const Grid& g = h.grid;
  double s = 0.0;
  for (std::size_t i = 1; i < g.nr(); ++i) {
    const double w = g.dr() * g.dz() * g.r(i) * g.r(i);
    for (std::size_t j = 1; j < g.nz(); ++j) {
      const double p = rho[i * g.cols() + j];
      const double d = h(i, j) - mean * p;
      s += w * d * d / p;
    }
  }
  return std::sqrt(s);
}

}  // namespace

std::size_t Trajectory::mode_index(basis::EigenIndex idx) const {
  for (std::size_t k = 0; k < modes.size(); ++k)
    if (modes[k] == idx) return k;
  throw std::out_of_range("Trajectory: mode " + basis::to_string(idx) + " not traced");
}

std::vector<double> Trajectory::coef_series(basis::EigenIndex idx) const {
  const std::size_t m = mode_index(idx);
  std::vector<double> out;
  for (const auto& row : coef) out.push_back(row[m]);
  return out;
}

std::vector<double> Trajectory::dcoef_series(basis::EigenIndex idx) const {
  const std::size_t m = mode_index(idx);
  std::vector<double> out;
  for (const auto& row : dcoef) out.push_back(row[m]);
  return out;
}

void write_trace_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,impulse";
  for (const auto& m : traj.modes) out << ",coef_" << m.ell << '_' << m.n;
  out << ",l2mu_residual,m_inf";
  for (const auto& m : traj.modes) out << ",dcoef_" << m.ell << '_' << m.n;
  out << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << traj.times[k] << ',' << traj.impulse[k];
    for (double c : traj.coef[k]) out << ',' << c;
    out << ',' << traj.l2mu_residual[k] << ',' << traj.m_inf[k];
    for (double c : traj.dcoef[k]) out << ',' << c;
    out << '\n';
  }
}

Trajectory run(const EvolveConfig& config, const CheckpointSink& sink) {
  const Grid& g = config.grid;
  double t0 = 0.0;
  Field h = make_initial(g, config.initial, &t0);
  const double span = config.t_end - t0;
  if (!(config.dt > 0.0)) throw std::invalid_argument("run: dt must be positive");
  if (span < 0.0) throw std::invalid_argument("run: t_end precedes the initial time");
  const long long steps = std::llround(span / config.dt);
  if (std::abs(static_cast<double>(steps) * config.dt - span) > 1e-9 * std::max(1.0, std::abs(config.t_end)))
    throw std::invalid_argument("run: t_end - t_start is not a whole number of steps");

  Integrator integ(g, config.dt, config.nonlinear_on, config.cfl, config.refresh_velocity);
  const unsigned max_ell = config.trace_level / 2, max_n = config.trace_level;
  const DiscreteModes discrete(integ.op(), max_ell, max_n);
  const ContinuumProjector continuum(g, max_ell, max_n);
  std::vector<double> rho(g.size(), 0.0);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) rho[i * g.cols() + j] = rho_star(g.r(i), g.z(j));

  // Discrete mu-mass of f = 1, so that I / mass is the exact projection on constants.
  double mass = 0.0;
  for (std::size_t i = 1; i < g.nr(); ++i)
    for (std::size_t j = 1; j < g.nz(); ++j) mass += g.dr() * g.dz() * g.r(i) * g.r(i) * rho[i * g.cols() + j];

  Trajectory traj;
  traj.dt = config.dt;
  traj.modes = basis::modes_up_to_level(config.trace_level);
  for (const auto& m : traj.modes) traj.discrete_rates.push_back(discrete.cn_rate(m, config.dt));

  auto record = [&](double t, const Field& state, const biot::Velocity& m) {
    const double I = impulse(state);
    traj.times.push_back(t);
    traj.impulse.push_back(I);
    traj.coef.push_back(continuum.project(state, traj.modes));
    traj.dcoef.push_back(discrete.project_all(state, traj.modes));
    traj.l2mu_residual.push_back(l2mu_residual(state, I / mass, rho));
    traj.m_inf.push_back(biot::velocity_sup(m));
  };
  auto checkpoint = [&](double t, const Field& state) {
    traj.checkpoint_times.push_back(t);
    traj.checkpoints.push_back(state);
    if (sink) sink(t, state);
  };

  checkpoint(t0, h);
  long long n = 0;
  try {
    for (; n < steps; ++n) {
      const double t = t0 + static_cast<double>(n) * config.dt;
      Field next = integ.step(h, t);
      record(t, h, integ.last_velocity());
      if (!next.all_finite()) throw SolverError("run: non-finite state after step", 0.0);
      h = std::move(next);
      if (config.checkpoint_every > 0 && (n + 1) % static_cast<long long>(config.checkpoint_every) == 0 &&
          n + 1 < steps)
        checkpoint(t0 + static_cast<double>(n + 1) * config.dt, h);
    }
    const double t_final = t0 + static_cast<double>(steps) * config.dt;
    record(t_final, h, biot::velocity_from_stream(integ.stream_solver().solve(h)));
    checkpoint(t_final, h);
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "run aborted at step " << n << " (t=" << t0 + static_cast<double>(n) * config.dt << "): " << e.what();
    throw RunAborted(msg.str(), std::move(traj), std::current_exception());
  }
  return traj;
}

}  // namespace axivort::evolve
