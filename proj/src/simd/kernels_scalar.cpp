#include "axivort/simd/kernels.hpp"

#include <algorithm>

namespace axivort::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

void transform_rows_scalar(std::size_t rows, std::size_t n_in, std::size_t n_out,
                           const double* x, std::size_t ldx, const double* m,
                           std::size_t ldm, double* y, std::size_t ldy) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* yi = y + i * ldy;
    std::fill(yi, yi + n_out, 0.0);
    const double* xi = x + i * ldx;
    for (std::size_t j = 0; j < n_in; ++j) {
      const double xv = xi[j];
      const double* mj = m + j * ldm;
      for (std::size_t k = 0; k < n_out; ++k) yi[k] += xv * mj[k];
    }
  }
}

void tridiag_solve_batch_scalar(std::size_t len, std::size_t width,
                                const double* lower, const double* inv_pivot,
                                const double* upper_scaled, double* rhs,
                                std::size_t ld) {
  if (len == 0) return;
  for (std::size_t k = 0; k < width; ++k) rhs[k] *= inv_pivot[k];
  for (std::size_t i = 1; i < len; ++i) {
    double* b = rhs + i * ld;
    const double* prev = rhs + (i - 1) * ld;
    const double* w = inv_pivot + i * ld;
    const double a = lower[i];
    for (std::size_t k = 0; k < width; ++k) b[k] = (b[k] - a * prev[k]) * w[k];
  }
  for (std::size_t i = len - 1; i-- > 0;) {
    double* x = rhs + i * ld;
    const double* next = rhs + (i + 1) * ld;
    const double* c = upper_scaled + i * ld;
    for (std::size_t k = 0; k < width; ++k) x[k] -= c[k] * next[k];
  }
}

void tensor_stencil_scalar(std::size_t rows, std::size_t cols, std::size_t ld,
                           const double* x, double s, const double* rl,
                           const double* rd, const double* ru, const double* zl,
                           const double* zd, const double* zu, double* y) {
  for (std::size_t i = 1; i + 1 < rows; ++i) {
    const double* xm = x + (i - 1) * ld;
    const double* x0 = x + i * ld;
    const double* xp = x + (i + 1) * ld;
    double* yi = y + i * ld;
    for (std::size_t j = 1; j + 1 < cols; ++j) {
      const double acc = rl[i] * xm[j] + rd[i] * x0[j] + ru[i] * xp[j] +
                         zl[j] * x0[j - 1] + zd[j] * x0[j] + zu[j] * x0[j + 1];
      yi[j] = x0[j] + s * acc;
    }
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", dot_scalar, transform_rows_scalar,
                                 tridiag_solve_batch_scalar, tensor_stencil_scalar};
  return table;
}

}  // namespace axivort::simd
