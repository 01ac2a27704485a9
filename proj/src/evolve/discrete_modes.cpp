#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "axivort/evolve.hpp"

namespace axivort::evolve {
namespace {

struct SymEig {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

SymEig tridiagonal_eigen(const std::vector<double>& diag, const std::vector<double>& off) {
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), static_cast<Eigen::Index>(diag.size()));
  Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(off.data(), static_cast<Eigen::Index>(off.size()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw std::runtime_error("DiscreteModes: eigensolver failed");
  return {eig.eigenvalues(), eig.eigenvectors()};
}

}  // namespace

DiscreteModes::DiscreteModes(const LinearOperator& op, unsigned max_ell, unsigned max_n)
    : grid_(op.grid()), max_ell_(max_ell), max_n_(max_n) {
  const Grid& g = grid_;
  const std::size_t I = g.nr() - 1, J = g.nz() - 1;
  if (max_ell >= I || max_n >= J) throw std::invalid_argument("DiscreteModes: grid too coarse for requested modes");
  const double dr = g.dr(), dz = g.dz();
  const double sqrt_pi = std::sqrt(std::numbers::pi);

  // Radial eigenvector u of P A_r P^-1 maps to f_i = u_i e^{r^2/8} r^{-3/2};
  // with |u| = 1 the factor sqrt(8/dr) makes sum dr r^2 omega f^2 / 8 = 1.
  const SymEig er = tridiagonal_eigen(op.r_sym_diag(), op.r_sym_off());
  radial_.assign(max_ell + 1, std::vector<double>(g.rows(), 0.0));
  rate_r_.resize(max_ell + 1);
  for (unsigned ell = 0; ell <= max_ell; ++ell) {
    const Eigen::Index col = static_cast<Eigen::Index>(I - 1 - ell);
    rate_r_[ell] = -er.values[col];
    double overlap = 0.0;
    for (std::size_t a = 0; a < I; ++a) {
      const double r = g.r(a + 1);
      const double f = std::sqrt(8.0 / dr) * er.vectors(static_cast<Eigen::Index>(a), col) *
                       std::exp(0.125 * r * r) / (r * std::sqrt(r));
      radial_[ell][a + 1] = f;
      overlap += r * r * r * std::exp(-0.25 * r * r) * f * (ell % 2 == 0 ? 1.0 : -1.0) *
                 basis::laguerre(ell, 1.0, 0.25 * r * r);
    }
    if (overlap < 0.0)
      for (double& v : radial_[ell]) v = -v;
  }

  // Axial eigenvector w of Q A_z Q^-1 maps to f_j = w_j e^{z^2/8}.
  const SymEig ez = tridiagonal_eigen(op.z_sym_diag(), op.z_sym_off());
  axial_.assign(max_n + 1, std::vector<double>(g.cols(), 0.0));
  rate_z_.resize(max_n + 1);
  for (unsigned n = 0; n <= max_n; ++n) {
    const Eigen::Index col = static_cast<Eigen::Index>(J - 1 - n);
    rate_z_[n] = -ez.values[col];
    double overlap = 0.0;
    for (std::size_t b = 0; b < J; ++b) {
      const double z = g.z(b + 1);
      const double f = std::sqrt(2.0 * sqrt_pi / dz) * ez.vectors(static_cast<Eigen::Index>(b), col) *
                       std::exp(0.125 * z * z);
      axial_[n][b + 1] = f;
      overlap += std::exp(-0.25 * z * z) * f * basis::hermite(n, 0.5 * z);
    }
    if (overlap < 0.0)
      for (double& v : axial_[n]) v = -v;
  }
}

double DiscreteModes::rate(basis::EigenIndex idx) const {
  if (idx.ell > max_ell_ || idx.n > max_n_) throw std::out_of_range("DiscreteModes::rate: mode not built");
  return rate_r_[idx.ell] + rate_z_[idx.n];
}

double DiscreteModes::cn_rate(basis::EigenIndex idx, double dt) const {
  const double a = 0.5 * rate(idx) * dt;
  return std::log((1.0 + a) / (1.0 - a)) / dt;
}

double DiscreteModes::project(const Field& h, basis::EigenIndex idx) const {
  return project_all(h, {idx}).front();
}

std::vector<double> DiscreteModes::project_all(const Field& h, const std::vector<basis::EigenIndex>& modes) const {
  if (!(h.grid == grid_)) throw std::invalid_argument("DiscreteModes::project: grid mismatch");
  const Grid& g = grid_;
  unsigned top_ell = 0;
  for (const auto& m : modes) {
    if (m.ell > max_ell_ || m.n > max_n_) throw std::out_of_range("DiscreteModes::project: mode not built");
    top_ell = std::max(top_ell, m.ell);
  }
  // R_l(j) = sum_i dr r_i^2 radial_l(i) h(i, j)
  std::vector<std::vector<double>> contracted(top_ell + 1, std::vector<double>(g.cols(), 0.0));
  for (std::size_t i = 1; i < g.nr(); ++i) {
    const double w = g.dr() * g.r(i) * g.r(i);
    for (unsigned ell = 0; ell <= top_ell; ++ell) {
      const double c = w * radial_[ell][i];
      double* dst = contracted[ell].data();
      for (std::size_t j = 1; j < g.nz(); ++j) dst[j] += c * h(i, j);
    }
  }
  std::vector<double> out;
  out.reserve(modes.size());
  for (const auto& m : modes) {
    double s = 0.0;
    for (std::size_t j = 1; j < g.nz(); ++j) s += contracted[m.ell][j] * axial_[m.n][j];
    out.push_back(s * g.dz());
  }
  return out;
}

Field DiscreteModes::mode_field(basis::EigenIndex idx) const {
  if (idx.ell > max_ell_ || idx.n > max_n_) throw std::out_of_range("DiscreteModes::mode_field: mode not built");
  const Grid& g = grid_;
  Field h(g, FieldKind::vorticity_h);
  for (std::size_t i = 1; i < g.nr(); ++i)
    for (std::size_t j = 1; j < g.nz(); ++j)
      h(i, j) = rho_star(g.r(i), g.z(j)) * radial_[idx.ell][i] * axial_[idx.n][j];
  return h;
}

}  // namespace axivort::evolve
