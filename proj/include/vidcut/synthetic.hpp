#pragma once

#include "vidcut/attention.hpp"
#include "vidcut/raster_io.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace vidcut {

// Textured disk translating over a static textured background.
struct SyntheticParams {
    int width = 160;
    int height = 120;
    int frames = 30;
    double radius = 18.0;
    double start_x = 24.0;  // disk center in frame 0
    double start_y = 42.0;
    int velocity_x = 4;  // pixels per frame; integers keep the flow exact
    int velocity_y = 1;
    std::vector<double> scales{0.75, 1.0, 1.25};
    float score = 0.95f;
    std::uint64_t seed = 7;  // background noise
};

struct SyntheticClip {
    std::vector<Image> frames;
    std::vector<FlowField> flows;               // exact forward flow, frames - 1 fields
    std::vector<SegmentationMask> truth;        // 1 inside the disk
    std::vector<std::vector<Tensor>> features;  // per frame, per scale: (h, w, 2)
    Tensor weights;                             // (2, 1)
    ClassScores scores;
};

SyntheticClip make_synthetic_clip(const SyntheticParams& params = {});

// Writes frame_%06d.ppm, flow_%06d.flo, feat_%06d_s%d.tnsr, weights.tnsr,
// scores.json and gt_%06d.pgm (0 background, 1 disk).
void write_synthetic_clip(const SyntheticClip& clip, const std::filesystem::path& dir);

}  // namespace vidcut
