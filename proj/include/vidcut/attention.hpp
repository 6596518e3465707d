#pragma once

#include "vidcut/raster_io.hpp"
#include "vidcut/superpixel.hpp"

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace vidcut {

// Per-pixel class relevance, row-major.
struct AttentionMap {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    AttentionMap() = default;
    AttentionMap(int w, int h, float fill = 0.0f)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    float& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Class activation map: features (h, w, d) times classifier column c of
// weights (d, C). cam_raw keeps negative responses; cam clamps them at 0.
AttentionMap cam_raw(const Tensor& features, const Tensor& weights, int class_id);
AttentionMap cam(const Tensor& features, const Tensor& weights, int class_id);

// Half-pixel-centered bilinear sampling with edge clamping.
AttentionMap resize_bilinear(const AttentionMap& map, int width, int height);

// Divides by the maximum; an all-zero map stays all-zero.
void normalize_max(AttentionMap& map);

// Resizes every map to (width, height), takes the pixel-wise maximum and
// max-normalizes the result.
AttentionMap fuse_multiscale(std::span<const AttentionMap> maps, int width, int height);

// Mean attention per region divided by the largest region mean.
std::vector<double> superpixel_attention(const AttentionMap& att, const SuperpixelPartition& p);

AttentionMap attention_from_tensor(const Tensor& t);
Tensor attention_to_tensor(const AttentionMap& map);

// Per-frame classifier scores: frames[t][c].
struct ClassScores {
    std::vector<std::string> classes;
    std::vector<std::vector<float>> frames;

    static ClassScores from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    int class_index(const std::string& name_or_id) const;
};

struct RelevantInterval {
    int start_frame = 0;
    int end_frame = 0;  // inclusive
    int class_id = 0;

    int length() const { return end_frame - start_frame + 1; }
    friend bool operator==(const RelevantInterval&, const RelevantInterval&) = default;
};

// Maximal runs of frames with score > threshold that are at least min_run long.
std::vector<RelevantInterval> relevance_filter(const ClassScores& scores, int class_id, double threshold,
                                               int min_run = 5);

}  // namespace vidcut
