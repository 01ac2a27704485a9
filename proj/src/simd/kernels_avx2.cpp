#include "axivort/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#define AXIVORT_HAVE_AVX2 1
#include <immintrin.h>
#endif

namespace axivort::simd {

#ifdef AXIVORT_HAVE_AVX2
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

// 4 rows x 16 columns register tile.
inline void tile_4x16(std::size_t n_in, const double* x, std::size_t ldx,
                      const double* m, std::size_t ldm, double* y, std::size_t ldy) {
  __m256d acc[4][4];
  for (auto& row : acc)
    for (auto& v : row) v = _mm256_setzero_pd();
  for (std::size_t j = 0; j < n_in; ++j) {
    const double* mj = m + j * ldm;
    const __m256d m0 = _mm256_loadu_pd(mj);
    const __m256d m1 = _mm256_loadu_pd(mj + 4);
    const __m256d m2 = _mm256_loadu_pd(mj + 8);
    const __m256d m3 = _mm256_loadu_pd(mj + 12);
    for (int a = 0; a < 4; ++a) {
      const __m256d xv = _mm256_broadcast_sd(x + a * ldx + j);
      acc[a][0] = _mm256_fmadd_pd(xv, m0, acc[a][0]);
      acc[a][1] = _mm256_fmadd_pd(xv, m1, acc[a][1]);
      acc[a][2] = _mm256_fmadd_pd(xv, m2, acc[a][2]);
      acc[a][3] = _mm256_fmadd_pd(xv, m3, acc[a][3]);
    }
  }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) _mm256_storeu_pd(y + a * ldy + 4 * b, acc[a][b]);
}

// 1 row x 4 columns.
inline void tile_1x4(std::size_t n_in, const double* x, const double* m,
                     std::size_t ldm, double* y) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t j = 0; j < n_in; ++j)
    acc = _mm256_fmadd_pd(_mm256_broadcast_sd(x + j), _mm256_loadu_pd(m + j * ldm), acc);
  _mm256_storeu_pd(y, acc);
}

void transform_rows_avx2(std::size_t rows, std::size_t n_in, std::size_t n_out,
                         const double* x, std::size_t ldx, const double* m,
                         std::size_t ldm, double* y, std::size_t ldy) {
  const std::size_t n16 = n_out / 16 * 16;
  const std::size_t n4 = n_out / 4 * 4;
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) {
    for (std::size_t k = 0; k < n16; k += 16)
      tile_4x16(n_in, x + i * ldx, ldx, m + k, ldm, y + i * ldy + k, ldy);
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t k = n16; k < n4; k += 4)
        tile_1x4(n_in, x + (i + a) * ldx, m + k, ldm, y + (i + a) * ldy + k);
  }
  for (; i < rows; ++i)
    for (std::size_t k = 0; k < n4; k += 4)
      tile_1x4(n_in, x + i * ldx, m + k, ldm, y + i * ldy + k);
  if (n4 < n_out) {
    for (std::size_t r = 0; r < rows; ++r) {
      const double* xr = x + r * ldx;
      for (std::size_t k = n4; k < n_out; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n_in; ++j) s += xr[j] * m[j * ldm + k];
        y[r * ldy + k] = s;
      }
    }
  }
}

void tridiag_solve_batch_avx2(std::size_t len, std::size_t width,
                              const double* lower, const double* inv_pivot,
                              const double* upper_scaled, double* rhs,
                              std::size_t ld) {
  if (len == 0) return;
  const std::size_t w4 = width / 4 * 4;
  {
    std::size_t k = 0;
    for (; k < w4; k += 4)
      _mm256_storeu_pd(rhs + k, _mm256_mul_pd(_mm256_loadu_pd(rhs + k),
                                              _mm256_loadu_pd(inv_pivot + k)));
    for (; k < width; ++k) rhs[k] *= inv_pivot[k];
  }
  for (std::size_t i = 1; i < len; ++i) {
    double* b = rhs + i * ld;
    const double* prev = rhs + (i - 1) * ld;
    const double* w = inv_pivot + i * ld;
    const __m256d a = _mm256_set1_pd(lower[i]);
    std::size_t k = 0;
    for (; k < w4; k += 4) {
      const __m256d t = _mm256_fnmadd_pd(a, _mm256_loadu_pd(prev + k), _mm256_loadu_pd(b + k));
      _mm256_storeu_pd(b + k, _mm256_mul_pd(t, _mm256_loadu_pd(w + k)));
    }
    for (; k < width; ++k) b[k] = (b[k] - lower[i] * prev[k]) * w[k];
  }
  for (std::size_t i = len - 1; i-- > 0;) {
    double* x = rhs + i * ld;
    const double* next = rhs + (i + 1) * ld;
    const double* c = upper_scaled + i * ld;
    std::size_t k = 0;
    for (; k < w4; k += 4)
      _mm256_storeu_pd(x + k, _mm256_fnmadd_pd(_mm256_loadu_pd(c + k),
                                               _mm256_loadu_pd(next + k),
                                               _mm256_loadu_pd(x + k)));
    for (; k < width; ++k) x[k] -= c[k] * next[k];
  }
}

void tensor_stencil_avx2(std::size_t rows, std::size_t cols, std::size_t ld,
                         const double* x, double s, const double* rl,
                         const double* rd, const double* ru, const double* zl,
                         const double* zd, const double* zu, double* y) {
  const __m256d sv = _mm256_set1_pd(s);
  for (std::size_t i = 1; i + 1 < rows; ++i) {
    const double* xm = x + (i - 1) * ld;
    const double* x0 = x + i * ld;
    const double* xp = x + (i + 1) * ld;
    double* yi = y + i * ld;
    const __m256d a = _mm256_set1_pd(rl[i]);
    const __m256d d = _mm256_set1_pd(rd[i]);
    const __m256d c = _mm256_set1_pd(ru[i]);
    std::size_t j = 1;
    for (; j + 4 < cols; j += 4) {
      const __m256d xc = _mm256_loadu_pd(x0 + j);
      __m256d acc = _mm256_mul_pd(a, _mm256_loadu_pd(xm + j));
      acc = _mm256_fmadd_pd(d, xc, acc);
      acc = _mm256_fmadd_pd(c, _mm256_loadu_pd(xp + j), acc);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(zl + j), _mm256_loadu_pd(x0 + j - 1), acc);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(zd + j), xc, acc);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(zu + j), _mm256_loadu_pd(x0 + j + 1), acc);
      _mm256_storeu_pd(yi + j, _mm256_fmadd_pd(sv, acc, xc));
    }
    for (; j + 1 < cols; ++j) {
      const double acc = rl[i] * xm[j] + rd[i] * x0[j] + ru[i] * xp[j] +
                         zl[j] * x0[j - 1] + zd[j] * x0[j] + zu[j] * x0[j + 1];
      yi[j] = x0[j] + s * acc;
    }
  }
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{"avx2", dot_avx2, transform_rows_avx2,
                                 tridiag_solve_batch_avx2, tensor_stencil_avx2};
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_kernels() { return nullptr; }

#endif

}  // namespace axivort::simd
