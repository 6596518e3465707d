#include "vidcut/simd/kernels.hpp"

#include <cstdlib>

namespace vidcut::simd {

namespace {

std::uint32_t sad_u8_scalar(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += static_cast<std::uint32_t>(std::abs(int(a[i]) - int(b[i])));
    return sum;
}

void slic_assign_row_scalar(const SlicRow& row) {
    const std::size_t n = row.best.size();
    for (std::size_t i = 0; i < n; ++i) {
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

float dot_f32_scalar(std::span<const float> a, std::span<const float> b) {
    float sum = 0.0f;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

constexpr KernelTable kScalar{Isa::scalar, &sad_u8_scalar, &slic_assign_row_scalar, &dot_f32_scalar};

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable& active() {
    static const KernelTable& table = [] () -> const KernelTable& {
        if (const char* env = std::getenv("VIDCUT_SIMD"); env && std::string_view(env) == "scalar")
            return kScalar;
        if (const auto* t = avx2_kernels()) return *t;
        if (const auto* t = neon_kernels()) return *t;
        return kScalar;
    }();
    return table;
}

}  // namespace vidcut::simd
