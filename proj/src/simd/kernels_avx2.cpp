// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "kernels.hpp"

namespace confspec::simd::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double abs_sum_axpy_avx2(const double* x, double alpha, const double* y, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d va = _mm256_set1_pd(alpha);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fnmadd_pd(va, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign_mask, r));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(x[i] - alpha * y[i]);
  return s;
}

void matvec_avx2(const double* m, const double* v, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = dot_avx2(m + i * n, v, n);
}

}  // namespace

const KernelTable& avx2_kernels() noexcept {
  static const KernelTable table{"avx2", dot_avx2, abs_sum_axpy_avx2, matvec_avx2};
  return table;
}

}  // namespace confspec::simd::detail
