#pragma once

#include <cstddef>
#include <vector>

namespace axivort::simd {

/// LU factors of `width` tridiagonal systems of length `len` that share their
/// sub- and super-diagonals row by row and differ only on the diagonal.
/// Column k of the batch lives at stride `ld` (entry (i, k) at i * ld + k).
class TridiagonalBatch {
 public:
  TridiagonalBatch() = default;
  /// lower[i] couples row i to i-1, upper[i] couples row i to i+1,
  /// diag[i * ld + k] is the diagonal of system k. Throws std::domain_error on
  /// a vanishing pivot.
  TridiagonalBatch(std::size_t len, std::size_t width, std::size_t ld, const std::vector<double>& lower,
                   const std::vector<double>& diag, const std::vector<double>& upper);

  /// Overwrites rhs (same layout) with the solutions, using simd::active().
  void solve(double* rhs) const;

  std::size_t len() const { return len_; }
  std::size_t width() const { return width_; }
  std::size_t ld() const { return ld_; }

 private:
  std::size_t len_ = 0, width_ = 0, ld_ = 0;
  std::vector<double> lower_, inv_pivot_, upper_scaled_;
};

}  // namespace axivort::simd
