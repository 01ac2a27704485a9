#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "axivort/basis.hpp"

namespace axivort::basis {

std::string to_string(const EigenIndex& idx) {
  return "(" + std::to_string(idx.ell) + "," + std::to_string(idx.n) + ")";
}

double hermite(unsigned n, double y) {
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * y;
  for (unsigned k = 1; k < n; ++k) {
    const double next = 2.0 * y * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double laguerre(unsigned ell, double alpha, double s) {
  // (k+1) L_{k+1} = (2k + 1 + alpha - s) L_k - (k + alpha) L_{k-1}
  double prev = 1.0;
  if (ell == 0) return prev;
  double cur = 1.0 + alpha - s;
  for (unsigned k = 1; k < ell; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - s) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double laguerre1(unsigned ell, double s) {
  if (s < 0.0) throw std::domain_error("laguerre1: argument must be non-negative");
  return laguerre(ell, 1.0, s);
}

double normalization(EigenIndex idx) {
  const double log_norm2 = std::log(idx.ell + 1.0) + idx.n * std::numbers::ln2 +
                           std::lgamma(idx.n + 1.0);
  return std::exp(-0.5 * log_norm2);
}

int sign_convention(EigenIndex idx) { return idx.ell % 2 == 0 ? 1 : -1; }

double eigenfunction(EigenIndex idx, double r, double z) {
  if (r < 0.0) throw std::domain_error("eigenfunction: r must be non-negative");
  return sign_convention(idx) * normalization(idx) * laguerre(idx.ell, 1.0, 0.25 * r * r) *
         hermite(idx.n, 0.5 * z);
}

EigenDerivatives eigenfunction_derivatives(EigenIndex idx, double r, double z) {
  if (r < 0.0) throw std::domain_error("eigenfunction_derivatives: r must be non-negative");
  const double c = sign_convention(idx) * normalization(idx);
  const double s = 0.25 * r * r;
  const double y = 0.5 * z;

  // d/ds L_l^(a) = -L_{l-1}^(a+1); d/dy H_n = 2n H_{n-1}
  const double lag = laguerre(idx.ell, 1.0, s);
  const double lag_1 = idx.ell >= 1 ? -laguerre(idx.ell - 1, 2.0, s) : 0.0;
  const double lag_2 = idx.ell >= 2 ? laguerre(idx.ell - 2, 3.0, s) : 0.0;
  const double her = hermite(idx.n, y);
  const double her_1 = idx.n >= 1 ? 2.0 * idx.n * hermite(idx.n - 1, y) : 0.0;
  const double her_2 = idx.n >= 2 ? 4.0 * idx.n * (idx.n - 1.0) * hermite(idx.n - 2, y) : 0.0;

  EigenDerivatives d;
  d.value = c * lag * her;
  d.d_r = c * 0.5 * r * lag_1 * her;
  d.d_rr = c * (0.5 * lag_1 + s * lag_2) * her;
  d.d_z = c * lag * 0.5 * her_1;
  d.d_zz = c * lag * 0.25 * her_2;
  return d;
}

double apply_operator(EigenIndex idx, double r, double z) {
  if (r <= 0.0) throw std::domain_error("apply_operator: r must be positive");
  const EigenDerivatives d = eigenfunction_derivatives(idx, r, z);
  return -(d.d_rr + d.d_zz) + 0.5 * r * d.d_r + 0.5 * z * d.d_z - 3.0 / r * d.d_r;
}

HalfInteger eigenvalue(EigenIndex idx) { return HalfInteger{idx.level()}; }

std::vector<EigenIndex> enumerate_level(unsigned k) {
  std::vector<EigenIndex> out;
  for (unsigned ell = 0; 2 * ell <= k; ++ell) out.push_back({ell, k - 2 * ell});
  return out;
}

std::vector<EigenIndex> modes_up_to_level(unsigned max_level) {
  std::vector<EigenIndex> out;
  for (unsigned k = 0; k <= max_level; ++k) {
    const auto level = enumerate_level(k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace axivort::basis
