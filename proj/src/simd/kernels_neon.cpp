#include "vidcut/simd/kernels.hpp"
#include "kernels_internal.hpp"

#include <arm_neon.h>

#include <cstdlib>

namespace vidcut::simd::detail {

namespace {

std::uint32_t sad_u8_neon(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    const std::size_t n = a.size();
    std::size_t i = 0;
    uint32x4_t acc = vdupq_n_u32(0);
    for (; i + 16 <= n; i += 16) {
        const uint8x16_t diff = vabdq_u8(vld1q_u8(a.data() + i), vld1q_u8(b.data() + i));
        acc = vpadalq_u16(acc, vpaddlq_u8(diff));
    }
    std::uint32_t sum = vaddvq_u32(acc);
    for (; i < n; ++i) sum += static_cast<std::uint32_t>(std::abs(int(a[i]) - int(b[i])));
    return sum;
}

void slic_assign_row_neon(const SlicRow& row) {
    const std::size_t n = row.best.size();
    const float32x4_t cr = vdupq_n_f32(row.cr);
    const float32x4_t cg = vdupq_n_f32(row.cg);
    const float32x4_t cb = vdupq_n_f32(row.cb);
    const float32x4_t cx = vdupq_n_f32(row.cx);
    const float32x4_t dy2 = vdupq_n_f32(row.dy2);
    const float32x4_t w = vdupq_n_f32(row.spatial_weight);
    const float32x4_t x0 = vdupq_n_f32(row.x0);
    const int32x4_t center = vdupq_n_s32(row.center);
    const float lane_init[4] = {0.f, 1.f, 2.f, 3.f};
    const float32x4_t lane = vld1q_f32(lane_init);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        // vmulq/vaddq keep separate roundings; vmlaq would fuse on AArch64
        const float32x4_t dr = vsubq_f32(vld1q_f32(row.r.data() + i), cr);
        const float32x4_t dg = vsubq_f32(vld1q_f32(row.g.data() + i), cg);
        const float32x4_t db = vsubq_f32(vld1q_f32(row.b.data() + i), cb);
        const float32x4_t dc = vaddq_f32(vaddq_f32(vmulq_f32(dr, dr), vmulq_f32(dg, dg)), vmulq_f32(db, db));
        const float32x4_t idx = vaddq_f32(vdupq_n_f32(static_cast<float>(i)), lane);
        const float32x4_t dx = vsubq_f32(vaddq_f32(x0, idx), cx);
        const float32x4_t ds = vaddq_f32(vmulq_f32(dx, dx), dy2);
        const float32x4_t d = vaddq_f32(dc, vmulq_f32(w, ds));

        float* best_ptr = row.best.data() + i;
        std::int32_t* label_ptr = row.label.data() + i;
        const float32x4_t best = vld1q_f32(best_ptr);
        const uint32x4_t take = vcltq_f32(d, best);
        vst1q_f32(best_ptr, vbslq_f32(take, d, best));
        vst1q_s32(label_ptr, vbslq_s32(take, center, vld1q_s32(label_ptr)));
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

float dot_f32_neon(std::span<const float> a, std::span<const float> b) {
    const std::size_t n = a.size();
    std::size_t i = 0;
    float32x4_t acc = vdupq_n_f32(0.0f);
    for (; i + 4 <= n; i += 4) acc = vaddq_f32(acc, vmulq_f32(vld1q_f32(a.data() + i), vld1q_f32(b.data() + i)));
    float sum = vaddvq_f32(acc);
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

constexpr KernelTable kNeon{Isa::neon, &sad_u8_neon, &slic_assign_row_neon, &dot_f32_neon};

}  // namespace

const KernelTable* neon_table() { return &kNeon; }

}  // namespace vidcut::simd::detail
