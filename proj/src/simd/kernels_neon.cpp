#include <arm_neon.h>

#include <cmath>

#include "kernels.hpp"

namespace confspec::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double abs_sum_axpy_neon(const double* x, double alpha, const double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t r = vfmsq_f64(vld1q_f64(x + i), va, vld1q_f64(y + i));
    acc = vaddq_f64(acc, vabsq_f64(r));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += std::fabs(x[i] - alpha * y[i]);
  return s;
}

void matvec_neon(const double* m, const double* v, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = dot_neon(m + i * n, v, n);
}

}  // namespace

const KernelTable& neon_kernels() noexcept {
  static const KernelTable table{"neon", dot_neon, abs_sum_axpy_neon, matvec_neon};
  return table;
}

}  // namespace confspec::simd::detail
