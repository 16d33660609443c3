#include <cstdlib>
#include <string_view>

#include "kernels.hpp"

namespace confspec::simd {
namespace {

bool cpu_has_avx2_fma() {
#if defined(CONFSPEC_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  const char* forced = std::getenv("CONFSPEC_SIMD");
  if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_kernels();
  const auto all = available_kernels();
  return *all.back();
}

}  // namespace

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
#if defined(CONFSPEC_BUILD_AVX2)
  if (cpu_has_avx2_fma()) out.push_back(&detail::avx2_kernels());
#endif
#if defined(CONFSPEC_BUILD_NEON)
  out.push_back(&detail::neon_kernels());
#endif
  return out;
}

const KernelTable& active_kernels() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace confspec::simd
