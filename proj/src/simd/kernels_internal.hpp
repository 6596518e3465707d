#pragma once

#include "vidcut/simd/kernels.hpp"

namespace vidcut::simd::detail {

// Defined only in the translation units built for the matching target.
const KernelTable* avx2_table();
const KernelTable* neon_table();

}  // namespace vidcut::simd::detail
