#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "axivort/evolve.hpp"
#include "axivort/simd/kernels.hpp"

namespace axivort::evolve {

LinearOperator::LinearOperator(const Grid& grid) : grid_(grid) {
  const std::size_t nr = grid.nr(), nz = grid.nz();
  const double dr = grid.dr(), dz = grid.dz();
  rl_.assign(nr + 1, 0.0);
  rd_.assign(nr + 1, 0.0);
  ru_.assign(nr + 1, 0.0);
  zl_.assign(nz + 1, 0.0);
  zd_.assign(nz + 1, 0.0);
  zu_.assign(nz + 1, 0.0);
  pr_.assign(nr + 1, 0.0);
  pz_.assign(nz + 1, 0.0);

  // Radial flux F_{i+1/2} = (r_m^3 / dr) (e^{(r_{i+1}^2 - r_m^2)/4} h_{i+1}/r_{i+1}
  //                                       - e^{(r_i^2 - r_m^2)/4} h_i / r_i), F_{1/2} = 0.
  for (std::size_t i = 1; i < nr; ++i) {
    const double r = grid.r(i);
    const double scale = 1.0 / (r * r * dr * dr);
    const double rp = r + 0.5 * dr;
    const double rn = grid.r(i + 1);
    ru_[i] = scale * rp * rp * rp * std::exp(0.25 * (rn * rn - rp * rp)) / rn;
    double d = -scale * rp * rp * rp * std::exp(0.25 * (r * r - rp * rp)) / r;
    if (i >= 2) {
      const double rm = r - 0.5 * dr;
      const double rprev = grid.r(i - 1);
      rl_[i] = scale * rm * rm * rm * std::exp(0.25 * (rprev * rprev - rm * rm)) / rprev;
      d -= scale * rm * rm * rm * std::exp(0.25 * (r * r - rm * rm)) / r;
    }
    rd_[i] = d;
    pr_[i] = std::sqrt(r) * std::exp(0.125 * r * r);
  }
  // Axial flux G_{j+1/2} = (e^{(z_{j+1}^2 - z_m^2)/4} h_{j+1} - e^{(z_j^2 - z_m^2)/4} h_j) / dz.
  const double idz2 = 1.0 / (dz * dz);
  for (std::size_t j = 1; j < nz; ++j) {
    const double z = grid.z(j);
    const double zp = z + 0.5 * dz, zm = z - 0.5 * dz;
    const double zn = grid.z(j + 1), zprev = grid.z(j - 1);
    zu_[j] = idz2 * std::exp(0.25 * (zn * zn - zp * zp));
    zl_[j] = idz2 * std::exp(0.25 * (zprev * zprev - zm * zm));
    zd_[j] = -idz2 * (std::exp(0.25 * (z * z - zp * zp)) + std::exp(0.25 * (z * z - zm * zm)));
    pz_[j] = std::exp(0.125 * z * z);
  }
}

Field LinearOperator::apply(const Field& h) const {
  if (!(h.grid == grid_)) throw std::invalid_argument("LinearOperator::apply: grid mismatch");
  Field out(grid_, h.kind);
  for (std::size_t i = 1; i < grid_.nr(); ++i)
    for (std::size_t j = 1; j < grid_.nz(); ++j)
      out(i, j) = rl_[i] * h(i - 1, j) + (rd_[i] + zd_[j]) * h(i, j) + ru_[i] * h(i + 1, j) +
                  zl_[j] * h(i, j - 1) + zu_[j] * h(i, j + 1);
  return out;
}

std::vector<double> LinearOperator::r_sym_diag() const { return {rd_.begin() + 1, rd_.end() - 1}; }

std::vector<double> LinearOperator::r_sym_off() const {
  std::vector<double> off;
  for (std::size_t i = 1; i + 1 < grid_.nr(); ++i) off.push_back(std::sqrt(ru_[i] * rl_[i + 1]));
  return off;
}

std::vector<double> LinearOperator::z_sym_diag() const { return {zd_.begin() + 1, zd_.end() - 1}; }

std::vector<double> LinearOperator::z_sym_off() const {
  std::vector<double> off;
  for (std::size_t j = 1; j + 1 < grid_.nz(); ++j) off.push_back(std::sqrt(zu_[j] * zl_[j + 1]));
  return off;
}

Field linear_rhs(const Field& h) { return LinearOperator(h.grid).apply(h); }

CrankNicolson::CrankNicolson(const LinearOperator& op, double dt) : op_(&op), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("CrankNicolson: dt must be positive");
  const Grid& g = op.grid();
  I_ = g.nr() - 1;
  J_ = g.nz() - 1;

  const std::vector<double> zd = op.z_sym_diag(), zo = op.z_sym_off();
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(zd.data(), static_cast<Eigen::Index>(J_));
  Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(zo.data(), static_cast<Eigen::Index>(J_ - 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw std::runtime_error("CrankNicolson: axial eigensolver failed");
  const Eigen::MatrixXd& Q = eig.eigenvectors();

  // A_z = D^-1 Q Lambda Q^T D with D = diag(q_j): forward x -> x D Q, backward y -> y Q^T D^-1.
  fwd_.resize(J_ * J_);
  bwd_.resize(J_ * J_);
  lambda_z_.resize(J_);
  for (std::size_t k = 0; k < J_; ++k) lambda_z_[k] = eig.eigenvalues()[static_cast<Eigen::Index>(k)];
  for (std::size_t j = 0; j < J_; ++j) {
    const double q = op.z_scale()[j + 1];
    for (std::size_t k = 0; k < J_; ++k) {
      const double v = Q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      fwd_[j * J_ + k] = q * v;
      bwd_[k * J_ + j] = v / q;
    }
  }

  const std::vector<double> rdg = op.r_sym_diag(), ro = op.r_sym_off();
  const double h = 0.5 * dt;
  std::vector<double> lower(I_, 0.0), upper(I_, 0.0), diag(I_ * J_);
  for (std::size_t a = 0; a < I_; ++a) {
    if (a > 0) lower[a] = -h * ro[a - 1];
    if (a + 1 < I_) upper[a] = -h * ro[a];
    for (std::size_t k = 0; k < J_; ++k) diag[a * J_ + k] = 1.0 - h * (rdg[a] + lambda_z_[k]);
  }
  thomas_ = simd::TridiagonalBatch(I_, J_, J_, lower, diag, upper);
  work_a_.resize(I_ * J_);
  work_b_.resize(I_ * J_);
}

Field CrankNicolson::explicit_half(const Field& h) const {
  const Grid& g = op_->grid();
  Field out(g, h.kind);
  simd::active().tensor_stencil(g.rows(), g.cols(), g.cols(), h.values.data(), 0.5 * dt_, op_->r_lower().data(),
                                op_->r_diag().data(), op_->r_upper().data(), op_->z_lower().data(),
                                op_->z_diag().data(), op_->z_upper().data(), out.values.data());
  return out;
}

void CrankNicolson::solve_in_place(Field& rhs) const {
  const Grid& g = op_->grid();
  if (!(rhs.grid == g)) throw std::invalid_argument("CrankNicolson::solve_in_place: grid mismatch");
  const auto& p = op_->r_scale();
  for (std::size_t a = 0; a < I_; ++a) {
    const double s = p[a + 1];
    const double* src = rhs.values.data() + (a + 1) * g.cols() + 1;
    double* dst = work_a_.data() + a * J_;
    for (std::size_t b = 0; b < J_; ++b) dst[b] = s * src[b];
  }
  const auto& k = simd::active();
  k.transform_rows(I_, J_, J_, work_a_.data(), J_, fwd_.data(), J_, work_b_.data(), J_);
  thomas_.solve(work_b_.data());
  k.transform_rows(I_, J_, J_, work_b_.data(), J_, bwd_.data(), J_, work_a_.data(), J_);
  apply_dirichlet(rhs);
  for (std::size_t a = 0; a < I_; ++a) {
    const double s = 1.0 / p[a + 1];
    const double* src = work_a_.data() + a * J_;
    double* dst = rhs.values.data() + (a + 1) * g.cols() + 1;
    for (std::size_t b = 0; b < J_; ++b) dst[b] = s * src[b];
  }
}

}  // namespace axivort::evolve
