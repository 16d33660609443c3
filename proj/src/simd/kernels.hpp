#pragma once

#include "confspec/simd.hpp"

namespace confspec::simd::detail {

#if defined(CONFSPEC_BUILD_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif

#if defined(CONFSPEC_BUILD_NEON)
const KernelTable& neon_kernels() noexcept;
#endif

}  // namespace confspec::simd::detail
