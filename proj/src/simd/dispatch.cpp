#include "vidcut/simd/kernels.hpp"
#include "kernels_internal.hpp"

namespace vidcut::simd {

const KernelTable* avx2_kernels() {
#if defined(VIDCUT_HAVE_AVX2)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2")) return detail::avx2_table();
#endif
    return nullptr;
}

const KernelTable* neon_kernels() {
#if defined(VIDCUT_HAVE_NEON)
    return detail::neon_table();  // NEON is baseline on AArch64
#else
    return nullptr;
#endif
}

}  // namespace vidcut::simd
