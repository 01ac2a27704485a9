#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "axivort/simd/kernels.hpp"
#include "doctest.h"

using axivort::simd::KernelTable;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace

TEST_CASE("active table is one of the known tables") {
  const KernelTable& t = axivort::simd::active();
  const bool known = &t == &axivort::simd::scalar_kernels() || &t == axivort::simd::avx2_kernels();
  CHECK(known);
}

TEST_CASE("scalar dot matches a direct sum") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {0u, 1u, 3u, 17u, 64u}) {
    auto a = random_vector(n, rng), b = random_vector(n, rng);
    long double ref = 0.0L;
    for (std::size_t k = 0; k < n; ++k) ref += static_cast<long double>(a[k]) * b[k];
    CHECK(axivort::simd::scalar_kernels().dot(a.data(), b.data(), n) ==
          doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
  }
}

TEST_CASE("scalar thomas solve inverts a tridiagonal matrix") {
  // diag 4, off-diagonals -1: factor then multiply back.
  const std::size_t len = 9, width = 3, ld = 5;
  std::vector<double> lower(len, -1.0), inv_pivot(len * ld), upper_scaled(len * ld);
  for (std::size_t k = 0; k < width; ++k) {
    double piv = 4.0 + k;
    inv_pivot[k] = 1.0 / piv;
    upper_scaled[k] = -1.0 / piv;
    for (std::size_t i = 1; i < len; ++i) {
      piv = 4.0 + k - (-1.0) * upper_scaled[(i - 1) * ld + k];
      inv_pivot[i * ld + k] = 1.0 / piv;
      upper_scaled[i * ld + k] = -1.0 / piv;
    }
  }
  std::mt19937_64 rng(2);
  auto x = random_vector(len * ld, rng);
  std::vector<double> b(len * ld, 0.0);
  for (std::size_t k = 0; k < width; ++k)
    for (std::size_t i = 0; i < len; ++i) {
      double v = (4.0 + k) * x[i * ld + k];
      if (i > 0) v -= x[(i - 1) * ld + k];
      if (i + 1 < len) v -= x[(i + 1) * ld + k];
      b[i * ld + k] = v;
    }
  axivort::simd::scalar_kernels().tridiag_solve_batch(len, width, lower.data(), inv_pivot.data(),
                                                      upper_scaled.data(), b.data(), ld);
  for (std::size_t k = 0; k < width; ++k)
    for (std::size_t i = 0; i < len; ++i) CHECK(b[i * ld + k] == doctest::Approx(x[i * ld + k]).epsilon(1e-13));
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const KernelTable* fast = axivort::simd::avx2_kernels();
  if (fast == nullptr) {
    MESSAGE("AVX2 not available on this host; equivalence test skipped");
    return;
  }
  const KernelTable& ref = axivort::simd::scalar_kernels();
  std::mt19937_64 rng(3);

  SUBCASE("dot") {
    for (std::size_t n : {0u, 1u, 5u, 8u, 13u, 257u}) {
      auto a = random_vector(n, rng), b = random_vector(n, rng);
      CHECK(fast->dot(a.data(), b.data(), n) ==
            doctest::Approx(ref.dot(a.data(), b.data(), n)).epsilon(1e-13));
    }
  }
  SUBCASE("transform_rows") {
    for (auto [rows, n_in, n_out] : {std::array<std::size_t, 3>{1, 1, 1}, {5, 7, 3}, {9, 33, 35},
                                     {17, 40, 19}, {64, 64, 64}}) {
      const std::size_t ldx = n_in + 2, ldm = n_out + 1, ldy = n_out + 3;
      auto x = random_vector(rows * ldx, rng), m = random_vector(n_in * ldm, rng);
      std::vector<double> y0(rows * ldy, 7.0), y1(rows * ldy, 7.0);
      ref.transform_rows(rows, n_in, n_out, x.data(), ldx, m.data(), ldm, y0.data(), ldy);
      fast->transform_rows(rows, n_in, n_out, x.data(), ldx, m.data(), ldm, y1.data(), ldy);
      CHECK(max_diff(y0, y1) < 1e-12);
    }
  }
  SUBCASE("tridiag_solve_batch") {
    for (std::size_t width : {1u, 3u, 4u, 11u, 32u}) {
      const std::size_t len = 13, ld = width + 1;
      std::vector<double> lower = random_vector(len, rng);
      std::vector<double> inv_pivot(len * ld), upper(len * ld);
      for (std::size_t k = 0; k < len * ld; ++k) {
        inv_pivot[k] = 0.5 + 0.25 * std::sin(static_cast<double>(k));
        upper[k] = 0.3 * std::cos(static_cast<double>(k));
      }
      auto b0 = random_vector(len * ld, rng);
      auto b1 = b0;
      ref.tridiag_solve_batch(len, width, lower.data(), inv_pivot.data(), upper.data(), b0.data(), ld);
      fast->tridiag_solve_batch(len, width, lower.data(), inv_pivot.data(), upper.data(), b1.data(), ld);
      CHECK(max_diff(b0, b1) < 1e-13);
    }
  }
  SUBCASE("tensor_stencil") {
    for (auto [rows, cols] : {std::array<std::size_t, 2>{3, 3}, {9, 10}, {17, 33}}) {
      const std::size_t ld = cols + 2;
      auto x = random_vector(rows * ld, rng);
      auto rl = random_vector(rows, rng), rd = random_vector(rows, rng), ru = random_vector(rows, rng);
      auto zl = random_vector(cols, rng), zd = random_vector(cols, rng), zu = random_vector(cols, rng);
      std::vector<double> y0(rows * ld, -3.0), y1(rows * ld, -3.0);
      ref.tensor_stencil(rows, cols, ld, x.data(), 0.37, rl.data(), rd.data(), ru.data(), zl.data(),
                         zd.data(), zu.data(), y0.data());
      fast->tensor_stencil(rows, cols, ld, x.data(), 0.37, rl.data(), rd.data(), ru.data(), zl.data(),
                           zd.data(), zu.data(), y1.data());
      CHECK(max_diff(y0, y1) < 1e-13);
    }
  }
}
