#pragma once

// Data-parallel inner loops used by the estimator's grid search and the
// permutation test. Each kernel has a scalar reference and optional AVX2/NEON
// variants; the widest variant the CPU supports is chosen at first use.
// Setting CONFSPEC_SIMD=scalar in the environment pins the scalar path.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace confspec::simd {

struct KernelTable {
  std::string_view name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i |x[i] - alpha * y[i]|
  double (*abs_sum_axpy)(const double* x, double alpha, const double* y, std::size_t n);
  // out[i] = sum_j m[i * n + j] * v[j] for a row-major n x n matrix
  void (*matvec)(const double* m, const double* v, double* out, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

// Every variant compiled into this binary that the running CPU supports,
// scalar first.
std::vector<const KernelTable*> available_kernels();

// Selected once per process.
const KernelTable& active_kernels();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size());
}

inline double abs_sum_axpy(std::span<const double> x, double alpha, std::span<const double> y) {
  return active_kernels().abs_sum_axpy(x.data(), alpha, y.data(), x.size());
}

}  // namespace confspec::simd
