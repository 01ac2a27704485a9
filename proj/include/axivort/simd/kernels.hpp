#pragma once

// Data-parallel inner loops used by the solvers and diagnostics.
//
// Every kernel has a portable scalar reference implementation and, on x86-64
// hosts with AVX2+FMA, a vectorized variant. The active table is chosen once
// at first use; setting AXIVORT_SIMD=scalar in the environment forces the
// reference path. Both paths are equivalence-tested.

#include <cstddef>
#include <string_view>

namespace axivort::simd {

/// Function table for one instruction-set level.
struct KernelTable {
  std::string_view name;

  /// Returns sum_k a[k] * b[k].
  double (*dot)(const double* a, const double* b, std::size_t n);

  /// Row-block transform y = x * m.
  ///   x: rows x n_in (leading dim ldx), m: n_in x n_out (leading dim ldm),
  ///   y: rows x n_out (leading dim ldy). y must not alias x or m.
  void (*transform_rows)(std::size_t rows, std::size_t n_in, std::size_t n_out,
                         const double* x, std::size_t ldx, const double* m,
                         std::size_t ldm, double* y, std::size_t ldy);

  /// Batched Thomas solve. `width` independent tridiagonal systems of length
  /// `len` are stored column-wise: entry (i, k) lives at rhs[i * ld + k].
  /// The factorization is precomputed (see TridiagonalBatch):
  ///   y_0 = b_0 * inv_pivot_0,  y_i = (b_i - lower_i * y_{i-1}) * inv_pivot_i
  ///   x_{len-1} = y_{len-1},    x_i = y_i - upper_scaled_i * x_{i+1}
  /// `lower` has one entry per row and is shared by all columns.
  void (*tridiag_solve_batch)(std::size_t len, std::size_t width,
                              const double* lower, const double* inv_pivot,
                              const double* upper_scaled, double* rhs,
                              std::size_t ld);

  /// Separable five-point stencil on a full (rows x cols) grid, row-major with
  /// leading dimension ld. For interior nodes 1 <= i < rows-1, 1 <= j < cols-1:
  ///   y_ij = x_ij + s * (rl_i x_{i-1,j} + rd_i x_ij + ru_i x_{i+1,j}
  ///                      + zl_j x_{i,j-1} + zd_j x_ij + zu_j x_{i,j+1})
  /// Boundary entries of y are left untouched.
  void (*tensor_stencil)(std::size_t rows, std::size_t cols, std::size_t ld,
                         const double* x, double s, const double* rl,
                         const double* rd, const double* ru, const double* zl,
                         const double* zd, const double* zu, double* y);
};

const KernelTable& scalar_kernels();

/// AVX2+FMA table, or nullptr when the host (or build) lacks support.
const KernelTable* avx2_kernels();

/// Table selected at runtime.
const KernelTable& active();

}  // namespace axivort::simd
