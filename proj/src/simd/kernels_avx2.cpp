// Built with -mavx2 (and deliberately without -mfma) so per-lane float math
// rounds exactly like the scalar reference.
#include "vidcut/simd/kernels.hpp"
#include "kernels_internal.hpp"

#include <immintrin.h>

#include <cstdlib>

namespace vidcut::simd::detail {

namespace {

std::uint32_t sad_u8_avx2(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    const std::size_t n = a.size();
    std::size_t i = 0;
    __m256i acc = _mm256_setzero_si256();
    for (; i + 32 <= n; i += 32) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data() + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.data() + i));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(va, vb));
    }
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    std::uint64_t sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) sum += static_cast<std::uint64_t>(std::abs(int(a[i]) - int(b[i])));
    return static_cast<std::uint32_t>(sum);
}

void slic_assign_row_avx2(const SlicRow& row) {
    const std::size_t n = row.best.size();
    const __m256 cr = _mm256_set1_ps(row.cr);
    const __m256 cg = _mm256_set1_ps(row.cg);
    const __m256 cb = _mm256_set1_ps(row.cb);
    const __m256 cx = _mm256_set1_ps(row.cx);
    const __m256 dy2 = _mm256_set1_ps(row.dy2);
    const __m256 w = _mm256_set1_ps(row.spatial_weight);
    const __m256 x0 = _mm256_set1_ps(row.x0);
    const __m256i center = _mm256_set1_epi32(row.center);
    const __m256 lane = _mm256_setr_ps(0.f, 1.f, 2.f, 3.f, 4.f, 5.f, 6.f, 7.f);

    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 dr = _mm256_sub_ps(_mm256_loadu_ps(row.r.data() + i), cr);
        const __m256 dg = _mm256_sub_ps(_mm256_loadu_ps(row.g.data() + i), cg);
        const __m256 db = _mm256_sub_ps(_mm256_loadu_ps(row.b.data() + i), cb);
        const __m256 dc = _mm256_add_ps(_mm256_add_ps(_mm256_mul_ps(dr, dr), _mm256_mul_ps(dg, dg)),
                                        _mm256_mul_ps(db, db));
        // i + lane is an exact small integer, so this matches x0 + float(i) per lane
        const __m256 idx = _mm256_add_ps(_mm256_set1_ps(static_cast<float>(i)), lane);
        const __m256 dx = _mm256_sub_ps(_mm256_add_ps(x0, idx), cx);
        const __m256 ds = _mm256_add_ps(_mm256_mul_ps(dx, dx), dy2);
        const __m256 d = _mm256_add_ps(dc, _mm256_mul_ps(w, ds));

        float* best_ptr = row.best.data() + i;
        std::int32_t* label_ptr = row.label.data() + i;
        const __m256 best = _mm256_loadu_ps(best_ptr);
        const __m256 take = _mm256_cmp_ps(d, best, _CMP_LT_OQ);
        _mm256_storeu_ps(best_ptr, _mm256_blendv_ps(best, d, take));
        const __m256i old = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(label_ptr));
        const __m256i upd = _mm256_castps_si256(_mm256_blendv_ps(
            _mm256_castsi256_ps(old), _mm256_castsi256_ps(center), take));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(label_ptr), upd);
    }
    for (; i < n; ++i) {
        const float dr = row.r[i] - row.cr;
        const float dg = row.g[i] - row.cg;
        const float db = row.b[i] - row.cb;
        const float dc = dr * dr + dg * dg + db * db;
        const float dx = (row.x0 + static_cast<float>(i)) - row.cx;
        const float ds = dx * dx + row.dy2;
        const float d = dc + row.spatial_weight * ds;
        if (d < row.best[i]) {
            row.best[i] = d;
            row.label[i] = row.center;
        }
    }
}

float dot_f32_avx2(std::span<const float> a, std::span<const float> b) {
    const std::size_t n = a.size();
    std::size_t i = 0;
    __m256 acc = _mm256_setzero_ps();
    for (; i + 8 <= n; i += 8)
        acc = _mm256_add_ps(acc, _mm256_mul_ps(_mm256_loadu_ps(a.data() + i), _mm256_loadu_ps(b.data() + i)));
    const __m128 lo = _mm256_castps256_ps128(acc);
    const __m128 hi = _mm256_extractf128_ps(acc, 1);
    __m128 s = _mm_add_ps(lo, hi);
    s = _mm_add_ps(s, _mm_movehl_ps(s, s));
    s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 0x55));
    float sum = _mm_cvtss_f32(s);
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

constexpr KernelTable kAvx2{Isa::avx2, &sad_u8_avx2, &slic_assign_row_avx2, &dot_f32_avx2};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2; }

}  // namespace vidcut::simd::detail
