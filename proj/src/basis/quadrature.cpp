#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "axivort/basis.hpp"

namespace axivort::basis {
namespace {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to one
  double residual = 0.0;
};

// Golub-Welsch on the Jacobi matrix of a monic three-term recurrence
//   p_{k+1} = (x - diag_k) p_k - offdiag2_k p_{k-1},
// then Newton polishing of the nodes and Christoffel weights.
GaussRule golub_welsch(const std::vector<double>& diag, const std::vector<double>& offdiag2) {
  const std::size_t K = diag.size();
  GaussRule rule;
  if (K == 1) {
    rule.nodes = {diag[0]};
    rule.weights = {1.0};
    return rule;
  }
  Eigen::VectorXd d(K), e(K - 1);
  for (std::size_t k = 0; k < K; ++k) d[k] = diag[k];
  for (std::size_t k = 0; k + 1 < K; ++k) e[k] = std::sqrt(offdiag2[k + 1]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("golub_welsch: tridiagonal eigenvalue iteration failed");

  rule.nodes.resize(K);
  rule.weights.resize(K);
  for (std::size_t i = 0; i < K; ++i) {
    double x = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
    double step = 0.0;
    for (int it = 0; it < 8; ++it) {
      double p_prev = 1.0, p = x - diag[0];
      double dp_prev = 0.0, dp = 1.0;
      for (std::size_t k = 1; k < K; ++k) {
        const double p_next = (x - diag[k]) * p - offdiag2[k] * p_prev;
        const double dp_next = p + (x - diag[k]) * dp - offdiag2[k] * dp_prev;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
      }
      step = p / dp;
      x -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    rule.residual = std::max(rule.residual, std::abs(step) / std::max(1.0, std::abs(x)));
    rule.nodes[i] = x;

    // Christoffel weight from the orthonormal recurrence.
    double q_prev = 0.0, q = 1.0, sum = 1.0;
    for (std::size_t k = 0; k + 1 < K; ++k) {
      const double b_next = std::sqrt(offdiag2[k + 1]);
      const double b_cur = k == 0 ? 0.0 : std::sqrt(offdiag2[k]);
      const double q_next = ((x - diag[k]) * q - b_cur * q_prev) / b_next;
      q_prev = q;
      q = q_next;
      sum += q * q;
    }
    rule.weights[i] = 1.0 / sum;
  }
  if (rule.residual > 1e-14)
    throw std::runtime_error("golub_welsch: node polishing did not converge");
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

GaussRule gauss_laguerre(std::size_t K, double alpha) {
  std::vector<double> diag(K), off2(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    diag[k] = 2.0 * k + alpha + 1.0;
    off2[k] = k * (k + alpha);
  }
  return golub_welsch(diag, off2);
}

GaussRule gauss_hermite(std::size_t K) {
  std::vector<double> diag(K, 0.0), off2(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) off2[k] = 0.5 * k;
  return golub_welsch(diag, off2);
}

Quadrature tensor_rule(std::size_t K, double alpha, double mass) {
  if (K < 1) throw std::invalid_argument("quadrature: need at least one node per axis");
  const GaussRule radial = gauss_laguerre(K, alpha);
  const GaussRule axial = gauss_hermite(K);
  Quadrature q;
  q.node_residual = std::max(radial.residual, axial.residual);
  q.nodes_r.resize(K);
  q.nodes_z.resize(K);
  for (std::size_t i = 0; i < K; ++i) q.nodes_r[i] = 2.0 * std::sqrt(radial.nodes[i]);
  for (std::size_t j = 0; j < K; ++j) q.nodes_z[j] = 2.0 * axial.nodes[j];
  q.weights.resize(K * K);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j)
      q.weights[i * K + j] = mass * radial.weights[i] * axial.weights[j];
  return q;
}

}  // namespace

double Quadrature::integrate(const std::function<double(double, double)>& g) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes_r.size(); ++i)
    for (std::size_t j = 0; j < nodes_z.size(); ++j)
      sum += weight(i, j) * g(nodes_r[i], nodes_z[j]);
  return sum;
}

Quadrature build_quadrature(std::size_t K) {
  // dmu = pi^-1/2 s e^-s e^-y^2 ds dy; zeroth moments Gamma(2) and sqrt(pi).
  const double mass = std::tgamma(2.0) * std::sqrt(std::numbers::pi) / std::sqrt(std::numbers::pi);
  return tensor_rule(K, 1.0, mass);
}

Quadrature build_profile_quadrature(std::size_t K) {
  // rho_* dr dz = (4 sqrt(pi))^-1 e^-s e^-y^2 ds dy; moments Gamma(1), sqrt(pi).
  const double mass = std::tgamma(1.0) * std::sqrt(std::numbers::pi) / (4.0 * std::sqrt(std::numbers::pi));
  return tensor_rule(K, 0.0, mass);
}

double project(const std::function<double(double, double)>& sampler, EigenIndex idx,
               const Quadrature& quad) {
  return quad.integrate([&](double r, double z) { return sampler(r, z) * eigenfunction(idx, r, z); });
}

double normalization_by_quadrature(EigenIndex idx, const Quadrature& quad) {
  const double norm2 = quad.integrate([&](double r, double z) {
    const double p = laguerre(idx.ell, 1.0, 0.25 * r * r) * hermite(idx.n, 0.5 * z);
    return p * p;
  });
  return 1.0 / std::sqrt(norm2);
}

double EigenCoeffs::sum_of_squares() const {
  double s = 0.0;
  for (const auto& [idx, c] : coeffs) s += c * c;
  return s;
}

EigenCoeffs decompose(const std::function<double(double, double)>& sampler, unsigned max_level,
                      const Quadrature& quad) {
  EigenCoeffs out;
  out.truncation_level = max_level;
  for (const EigenIndex& idx : modes_up_to_level(max_level)) out.coeffs[idx] = project(sampler, idx, quad);
  return out;
}

EigenCoeffs apply_operator_spectral(const EigenCoeffs& coeffs) {
  EigenCoeffs out = coeffs;
  for (auto& [idx, c] : out.coeffs) c *= eigenvalue(idx).value();
  return out;
}

void write_quadrature_csv(std::ostream& out, const Quadrature& quad) {
  out << "r,z,weight\n" << std::setprecision(17);
  for (std::size_t i = 0; i < quad.size_r(); ++i)
    for (std::size_t j = 0; j < quad.size_z(); ++j)
      out << quad.nodes_r[i] << ',' << quad.nodes_z[j] << ',' << quad.weight(i, j) << '\n';
}

void write_mode_table_csv(std::ostream& out, unsigned max_level) {
  out << "ell,n,lambda,c\n" << std::setprecision(17);
  for (const EigenIndex& idx : modes_up_to_level(max_level))
    out << idx.ell << ',' << idx.n << ',' << eigenvalue(idx).value() << ','
        << sign_convention(idx) * normalization(idx) << '\n';
}

}  // namespace axivort::basis
