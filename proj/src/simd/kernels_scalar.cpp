#include <cmath>

#include "kernels.hpp"

namespace confspec::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double abs_sum_axpy_scalar(const double* x, double alpha, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i] - alpha * y[i]);
  return s;
}

void matvec_scalar(const double* m, const double* v, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = dot_scalar(m + i * n, v, n);
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{"scalar", dot_scalar, abs_sum_axpy_scalar, matvec_scalar};
  return table;
}

}  // namespace confspec::simd
