#pragma once

#include "latentprobe/kernels.hpp"

namespace latentprobe::simd::detail {

#if defined(LATENTPROBE_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

#if defined(LATENTPROBE_HAVE_NEON)
const KernelTable& neon_kernels();
#endif

}  // namespace latentprobe::simd::detail
