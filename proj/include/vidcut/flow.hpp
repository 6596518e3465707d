#pragma once

#include "vidcut/raster_io.hpp"
#include "vidcut/superpixel.hpp"

#include <cstdint>
#include <vector>

namespace vidcut {

struct FlowLink {
    std::uint32_t from = 0;  // region in frame t
    std::uint32_t to = 0;    // region in frame t+1
    std::uint32_t count = 0; // pixels of `from` whose flow target lands in `to`

    friend bool operator==(const FlowLink&, const FlowLink&) = default;
};

// Links for one frame pair (t, t+1), sorted by (from, to).
struct FlowCorrespondence {
    std::vector<FlowLink> links;
};

// Integer block matching by minimum SAD over all channels. Ties prefer zero
// displacement, then the lexicographically smallest (dy, dx). Candidate
// blocks must lie entirely inside `b`.
FlowField estimate_flow_blockmatch(const Image& a, const Image& b, int block = 8, int radius = 6);

// Forward-maps every pixel of frame t by its rounded flow (half away from
// zero, per component); targets outside the frame are dropped.
FlowCorrespondence flow_links(const SuperpixelPartition& pt, const SuperpixelPartition& pt1, const FlowField& flow);

}  // namespace vidcut
