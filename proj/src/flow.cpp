#include "vidcut/flow.hpp"

#include "vidcut/error.hpp"
#include "vidcut/simd/kernels.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace vidcut {

FlowField estimate_flow_blockmatch(const Image& a, const Image& b, int block, int radius) {
    if (a.width != b.width || a.height != b.height || a.channels != b.channels)
        throw InputError("blockmatch: frame size mismatch");
    if (block < 4) throw InputError("blockmatch: block must be >= 4");
    if (radius < 1) throw InputError("blockmatch: radius must be >= 1");

    const auto& kernels = simd::active();
    const int w = a.width, h = a.height, ch = a.channels;
    const auto row_bytes = static_cast<std::size_t>(w) * ch;
    FlowField flow(w, h);

    for (int by = 0; by < h; by += block) {
        const int bh = std::min(block, h - by);
        for (int bx = 0; bx < w; bx += block) {
            const int bw = std::min(block, w - bx);
            const std::size_t span_len = static_cast<std::size_t>(bw) * ch;

            auto sad = [&](int dx, int dy) {
                std::uint32_t total = 0;
                for (int y = 0; y < bh; ++y) {
                    const std::size_t oa = (by + y) * row_bytes + static_cast<std::size_t>(bx) * ch;
                    const std::size_t ob = (by + y + dy) * row_bytes + static_cast<std::size_t>(bx + dx) * ch;
                    total += kernels.sad_u8(std::span<const std::uint8_t>(a.data).subspan(oa, span_len),
                                            std::span<const std::uint8_t>(b.data).subspan(ob, span_len));
                }
                return total;
            };

            const std::uint32_t zero_cost = sad(0, 0);
            std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
            int best_dx = 0, best_dy = 0;
            for (int dy = -radius; dy <= radius; ++dy) {
                if (by + dy < 0 || by + dy + bh > h) continue;
                for (int dx = -radius; dx <= radius; ++dx) {
                    if (bx + dx < 0 || bx + dx + bw > w) continue;
                    const auto cost = sad(dx, dy);
                    if (cost < best) {
                        best = cost;
                        best_dx = dx;
                        best_dy = dy;
                    }
                }
            }
            if (zero_cost <= best) best_dx = best_dy = 0;

            for (int y = by; y < by + bh; ++y) {
                for (int x = bx; x < bx + bw; ++x) {
                    flow.u[flow.index(x, y)] = static_cast<float>(best_dx);
                    flow.v[flow.index(x, y)] = static_cast<float>(best_dy);
                }
            }
        }
    }
    return flow;
}

FlowCorrespondence flow_links(const SuperpixelPartition& pt, const SuperpixelPartition& pt1, const FlowField& flow) {
    if (pt.width != pt1.width || pt.height != pt1.height || pt.width != flow.width || pt.height != flow.height)
        throw InputError("flow_links: partition/flow size mismatch");
    const int w = pt.width, h = pt.height;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> counts;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto i = flow.index(x, y);
            // std::round rounds halfway cases away from zero
            const double tx = std::round(static_cast<double>(x) + flow.u[i]);
            const double ty = std::round(static_cast<double>(y) + flow.v[i]);
            if (tx < 0 || ty < 0 || tx >= w || ty >= h) continue;
            ++counts[{pt.at(x, y), pt1.at(static_cast<int>(tx), static_cast<int>(ty))}];
        }
    }
    FlowCorrespondence out;
    out.links.reserve(counts.size());
    for (const auto& [key, n] : counts) out.links.push_back({key.first, key.second, n});
    return out;
}

}  // namespace vidcut
