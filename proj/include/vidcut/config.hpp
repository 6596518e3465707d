#pragma once

#include "vidcut/appearance.hpp"
#include "vidcut/graphcut.hpp"
#include "vidcut/motion.hpp"
#include "vidcut/retrieval.hpp"
#include "vidcut/superpixel.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace vidcut {

struct AttentionParams {
    std::vector<double> scales{0.75, 1.0, 1.25};
    double relevance_threshold = 0.8;
    int min_run = 5;
};

struct AppearanceParams {
    GmmParams gmm{};
    double attention_threshold = 0.5;  // splits fg / bg samples
};

struct FlowParams {
    bool allow_estimated = false;
    int block = 8;
    int radius = 6;
};

struct PipelineConfig {
    SlicParams slic{};
    AttentionParams attention{};
    MotionParams motion{};
    AppearanceParams appearance{};
    EnergyParams energy{};
    FlowParams flow{};
    RetrievalParams retrieval{};
    double fuse_background_threshold = 0.5;
    int jobs = 1;

    // Strict: unknown sections or keys and out-of-range values throw InputError.
    static PipelineConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    void validate() const;
};

// Parses JSON with // comments allowed.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

// Applies "section.key=value" (value parsed as JSON, else taken as a string).
void apply_override(nlohmann::json& config, const std::string& assignment);

}  // namespace vidcut
