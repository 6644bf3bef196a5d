#pragma once

#include "siclab/kernels.hpp"

namespace siclab::kernels::detail {

KernelTable scalar_table();
#ifdef SICLAB_HAVE_AVX2
KernelTable avx2_table();
#endif
#ifdef SICLAB_HAVE_NEON
KernelTable neon_table();
#endif

}  // namespace siclab::kernels::detail
