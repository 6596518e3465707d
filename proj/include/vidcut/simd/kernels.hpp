#pragma once

// Data-parallel inner loops with a scalar reference and vector variants.
//
// Every variant of a kernel must agree with the scalar reference:
//   sad_u8          exactly
//   slic_assign_row exactly (same operation order, no FMA contraction)
//   dot_f32         within float reassociation error
//
// The active table is chosen once at first use from the CPU's features.
// Setting VIDCUT_SIMD=scalar in the environment forces the reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace vidcut::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

// One image row against one SLIC cluster center. Colors are planar and
// already scaled; x of element i is x0 + i (pixel-center coordinates).
struct SlicRow {
    std::span<const float> r, g, b;
    std::span<float> best;
    std::span<std::int32_t> label;
    float x0 = 0.0f;
    float dy2 = 0.0f;  // (y - cy)^2 for this row
    float cr = 0.0f, cg = 0.0f, cb = 0.0f, cx = 0.0f;
    float spatial_weight = 0.0f;
    std::int32_t center = 0;
};

struct KernelTable {
    Isa isa;
    // Sum of absolute differences of two equally sized byte spans.
    std::uint32_t (*sad_u8)(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
    // d = |c - c_k|^2 + w * ((x - cx)^2 + dy2); takes the center when d < best.
    void (*slic_assign_row)(const SlicRow& row);
    float (*dot_f32)(std::span<const float> a, std::span<const float> b);
};

const KernelTable& scalar_kernels();
// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

const KernelTable& active();

}  // namespace vidcut::simd
