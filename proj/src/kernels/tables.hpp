#pragma once

#include "gtpool/kernels.hpp"

namespace gtpool::kernels {

#if defined(GTPOOL_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

#if defined(GTPOOL_HAVE_NEON)
const KernelTable& neon_kernel_table();
#endif

}  // namespace gtpool::kernels
