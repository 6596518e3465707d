#pragma once

#include "vidcut/raster_io.hpp"

#include <array>
#include <cstdint>
#include <vector>

#include "json.hpp"

namespace vidcut {

struct RegionStats {
    std::uint32_t pixel_count = 0;
    std::array<double, 3> mean_rgb{};  // in [0,1]
    std::array<double, 2> centroid{};  // (x, y) of pixel centers
};

// Per-frame label map plus region statistics. Labels are dense in [0, count).
struct SuperpixelPartition {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> labels;
    std::vector<RegionStats> regions;

    std::size_t count() const { return regions.size(); }
    std::uint32_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

// Builds a partition from an arbitrary label map by renumbering labels in
// raster order of first appearance and recomputing stats from `image`.
// Connectivity is not enforced here.
SuperpixelPartition partition_from_labels(const Image& image, std::vector<std::uint32_t> labels);

// Throws InvariantError if labels, counts, 4-connectivity or stats disagree.
void validate_partition(const SuperpixelPartition& p, const Image& image);

struct SlicParams {
    int region_size = 15;
    double compactness = 10.0;
    int iterations = 10;
    // RGB is mapped to [0, color_scale] inside the distance. Larger values
    // follow texture more closely; 0 disables color.
    double color_scale = 20.0;
};

// SLIC in RGBxy space with a connectivity enforcement pass.
SuperpixelPartition slic(const Image& image, const SlicParams& params = {});

struct RegionAdjacency {
    std::uint32_t a = 0;  // a < b
    std::uint32_t b = 0;
    std::uint32_t boundary_length = 0;  // number of 4-neighbor pixel pairs

    friend bool operator==(const RegionAdjacency&, const RegionAdjacency&) = default;
};

// Sorted by (a, b).
std::vector<RegionAdjacency> region_adjacency(const SuperpixelPartition& p);

Image16 partition_to_image16(const SuperpixelPartition& p);
nlohmann::json partition_stats_json(const SuperpixelPartition& p);

}  // namespace vidcut
