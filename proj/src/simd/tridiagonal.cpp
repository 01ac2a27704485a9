#include "axivort/simd/tridiagonal.hpp"

#include <cmath>
#include <stdexcept>

#include "axivort/simd/kernels.hpp"

namespace axivort::simd {

TridiagonalBatch::TridiagonalBatch(std::size_t len, std::size_t width, std::size_t ld,
                                   const std::vector<double>& lower, const std::vector<double>& diag,
                                   const std::vector<double>& upper)
    : len_(len), width_(width), ld_(ld), lower_(lower), inv_pivot_(len * ld, 0.0), upper_scaled_(len * ld, 0.0) {
  if (width > ld || lower.size() < len || upper.size() < len || diag.size() < len * ld)
    throw std::invalid_argument("TridiagonalBatch: inconsistent sizes");
  for (std::size_t k = 0; k < width; ++k) {
    double cp = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double pivot = diag[i * ld + k] - (i > 0 ? lower[i] * cp : 0.0);
      if (pivot == 0.0 || !std::isfinite(pivot)) throw std::domain_error("TridiagonalBatch: singular pivot");
      inv_pivot_[i * ld + k] = 1.0 / pivot;
      cp = upper[i] / pivot;
      upper_scaled_[i * ld + k] = cp;
    }
  }
}

void TridiagonalBatch::solve(double* rhs) const {
  active().tridiag_solve_batch(len_, width_, lower_.data(), inv_pivot_.data(), upper_scaled_.data(), rhs, ld_);
}

}  // namespace axivort::simd
