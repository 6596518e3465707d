#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace vidcut {

struct KeyFrame {
    double time = 0.0;  // seconds
    double score = 0.0;
};

struct CandidateVideo {
    std::string id;
    std::string keyword;  // class the video was retrieved for
    double thumbnail_score = 0.0;
    double frame_rate = 0.0;
    double duration = 0.0;
    std::vector<KeyFrame> keyframes;
};

struct CorpusManifest {
    std::vector<CandidateVideo> videos;

    static CorpusManifest from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct ClipWindow {
    double start = 0.0;
    double end = 0.0;

    friend bool operator==(const ClipWindow&, const ClipWindow&) = default;
};

struct ClipSelection {
    std::string video_id;
    std::string keyword;
    std::vector<ClipWindow> windows;  // disjoint, sorted
    int keyframe_count = 0;
};

struct RetrievalParams {
    double thumbnail_threshold = 0.8;
    double keyframe_threshold = 0.8;
    int max_keyframes = 15;
    double window_seconds = 2.0;
    int max_videos_per_class = 300;
};

// Thumbnail gate (strict >), per-class cap by descending thumbnail score,
// then the top key-frames above threshold expanded to merged windows.
// Videos left without any key-frame produce no selection but still count
// toward their class cap. Output is grouped by class in order of first
// appearance, each group in descending thumbnail score.
std::vector<ClipSelection> retrieval_filter(const CorpusManifest& manifest, const RetrievalParams& params = {});

nlohmann::json selections_to_json(const std::vector<ClipSelection>& selections);

}  // namespace vidcut
