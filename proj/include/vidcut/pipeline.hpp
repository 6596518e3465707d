#pragma once

#include "vidcut/attention.hpp"
#include "vidcut/config.hpp"
#include "vidcut/graphcut.hpp"
#include "vidcut/raster_io.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace vidcut {

// Everything segment_video needs for one clip and one class.
struct VideoInputs {
    std::vector<Image> frames;
    // Per frame, one non-negative attention map per scale (any resolution).
    std::vector<std::vector<AttentionMap>> attention;
    // flows[t] maps frame t to t+1.
    std::vector<FlowField> flows;
    std::optional<ClassScores> scores;
    int class_id = 0;
};

struct SolveSummary {
    RelevantInterval interval;
    std::size_t nodes = 0;
    std::size_t spatial_edges = 0;
    std::size_t temporal_edges = 0;
    double energy = 0.0;
    double recomputed_energy = 0.0;
    std::size_t foreground_nodes = 0;
};

struct SegmentResult {
    std::vector<SegmentationMask> masks;  // one per input frame
    std::vector<AttentionMap> attention;  // fused attention, zero outside intervals
    std::vector<RelevantInterval> intervals;
    std::vector<SolveSummary> solves;
    std::vector<std::string> warnings;

    nlohmann::json summary_json() const;
};

// Where to write optional per-interval diagnostics; empty paths disable them.
struct DumpOptions {
    std::filesystem::path intermediates_dir;
    std::filesystem::path energy_dir;
};

// Relevance gate, superpixels, multi-scale attention, appearance GMMs,
// motion maps, spatio-temporal graph, energy and min-cut for each relevant
// interval. Frames outside every interval get all-zero masks.
SegmentResult segment_video(const VideoInputs& inputs, const PipelineConfig& config, const DumpOptions& dump = {});

// Reads frame_%06d.ppm, att_%06d[_s%d].tnsr or feat_%06d[_s%d].tnsr with
// weights.tnsr, flow_%06d.flo and an optional scores.json.
VideoInputs load_video_dir(const std::filesystem::path& dir, const std::string& class_name,
                           const PipelineConfig& config, std::vector<std::string>* warnings = nullptr);

// Pixel label = id of the most probable class (ties: lowest id), or 0 when
// every probability is below bg_threshold. Ids must lie in [1, 254].
Image fuse_labels(std::span<const AttentionMap> probabilities, std::span<const int> class_ids,
                  double bg_threshold = 0.5);

// Predicted masks: non-zero = foreground. Ground truth: 0 = background,
// 255 = void (excluded), anything else = foreground.
struct EvalItem {
    std::string video;
    int class_id = 0;
    Image prediction;
    Image ground_truth;
};

struct IouCounts {
    std::uint64_t tp = 0, fp = 0, fn = 0;
    std::uint64_t gt_pixels = 0;

    double iou() const;
    IouCounts& operator+=(const IouCounts& o);
};

struct EvalReport {
    struct ClassRow {
        int class_id = 0;
        IouCounts counts;
        double iou = 0.0;
    };
    struct VideoRow {
        std::string video;
        int class_id = 0;
        IouCounts counts;
        double iou = 0.0;
    };
    std::vector<ClassRow> classes;  // sorted by class id
    std::vector<VideoRow> videos;   // in order of first appearance
    double class_mean_iou = 0.0;    // over classes with ground-truth pixels
    double video_mean_iou = 0.0;    // over videos with ground-truth pixels

    nlohmann::json to_json() const;
};

IouCounts count_iou(const Image& prediction, const Image& ground_truth);
EvalReport evaluate_miou(std::span<const EvalItem> items);

struct TrainPair {
    AttentionMap attention;
    SegmentationMask mask;
    int class_id = 0;
    std::string source;
};

// Writes pair_%06d_att.tnsr / pair_%06d_mask.pgm and manifest.json into
// out_dir (created if missing) and returns the manifest.
nlohmann::json export_trainset(std::span<const TrainPair> pairs, const std::filesystem::path& out_dir);

std::string frame_name(const char* prefix, int index, const char* ext);

}  // namespace vidcut
