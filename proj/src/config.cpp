#include "vidcut/config.hpp"

#include "vidcut/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace vidcut {

namespace {

void reject_unknown(const nlohmann::json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw InputError("config: '" + where + "' must be an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw InputError("config: unknown key '" + where + "." + key + "'");
}

template <class T>
void read(const nlohmann::json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError("config: bad value for '" + where + "." + key + "'");
    }
}

void require(bool ok, const std::string& what) {
    if (!ok) throw InputError("config: " + what);
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    PipelineConfig c;
    reject_unknown(j, "config",
                   {"superpixel", "attention", "motion", "appearance", "energy", "flow", "retrieval", "fuse", "jobs"});
    if (j.contains("superpixel")) {
        const auto& s = j["superpixel"];
        reject_unknown(s, "superpixel", {"region_size", "compactness", "iterations", "color_scale"});
        read(s, "region_size", c.slic.region_size, "superpixel");
        read(s, "compactness", c.slic.compactness, "superpixel");
        read(s, "iterations", c.slic.iterations, "superpixel");
        read(s, "color_scale", c.slic.color_scale, "superpixel");
    }
    if (j.contains("attention")) {
        const auto& s = j["attention"];
        reject_unknown(s, "attention", {"scales", "relevance_threshold", "min_run"});
        read(s, "scales", c.attention.scales, "attention");
        read(s, "relevance_threshold", c.attention.relevance_threshold, "attention");
        read(s, "min_run", c.attention.min_run, "attention");
    }
    if (j.contains("motion")) {
        const auto& s = j["motion"];
        reject_unknown(s, "motion", {"lambda_b", "theta_b"});
        read(s, "lambda_b", c.motion.lambda_b, "motion");
        read(s, "theta_b", c.motion.theta_b, "motion");
    }
    if (j.contains("appearance")) {
        const auto& s = j["appearance"];
        reject_unknown(s, "appearance",
                       {"components", "iterations", "seed", "variance_floor", "attention_threshold"});
        read(s, "components", c.appearance.gmm.components, "appearance");
        read(s, "iterations", c.appearance.gmm.iterations, "appearance");
        read(s, "seed", c.appearance.gmm.seed, "appearance");
        read(s, "variance_floor", c.appearance.gmm.variance_floor, "appearance");
        read(s, "attention_threshold", c.appearance.attention_threshold, "appearance");
    }
    if (j.contains("energy")) {
        const auto& s = j["energy"];
        reject_unknown(s, "energy", {"lambda_a", "lambda_m", "lambda_c", "epsilon", "gamma"});
        read(s, "lambda_a", c.energy.lambda_a, "energy");
        read(s, "lambda_m", c.energy.lambda_m, "energy");
        read(s, "lambda_c", c.energy.lambda_c, "energy");
        read(s, "epsilon", c.energy.epsilon, "energy");
        read(s, "gamma", c.energy.gamma, "energy");
    }
    if (j.contains("flow")) {
        const auto& s = j["flow"];
        reject_unknown(s, "flow", {"allow_estimated", "block", "radius"});
        read(s, "allow_estimated", c.flow.allow_estimated, "flow");
        read(s, "block", c.flow.block, "flow");
        read(s, "radius", c.flow.radius, "flow");
    }
    if (j.contains("retrieval")) {
        const auto& s = j["retrieval"];
        reject_unknown(s, "retrieval",
                       {"thumbnail_threshold", "keyframe_threshold", "max_keyframes", "window_seconds",
                        "max_videos_per_class"});
        read(s, "thumbnail_threshold", c.retrieval.thumbnail_threshold, "retrieval");
        read(s, "keyframe_threshold", c.retrieval.keyframe_threshold, "retrieval");
        read(s, "max_keyframes", c.retrieval.max_keyframes, "retrieval");
        read(s, "window_seconds", c.retrieval.window_seconds, "retrieval");
        read(s, "max_videos_per_class", c.retrieval.max_videos_per_class, "retrieval");
    }
    if (j.contains("fuse")) {
        const auto& s = j["fuse"];
        reject_unknown(s, "fuse", {"background_threshold"});
        read(s, "background_threshold", c.fuse_background_threshold, "fuse");
    }
    read(j, "jobs", c.jobs, "config");
    c.validate();
    return c;
}

void PipelineConfig::validate() const {
    require(slic.region_size >= 2, "superpixel.region_size must be >= 2");
    require(slic.compactness > 0.0, "superpixel.compactness must be > 0");
    require(slic.iterations >= 1, "superpixel.iterations must be >= 1");
    require(slic.color_scale >= 0.0, "superpixel.color_scale must be >= 0");
    require(!attention.scales.empty(), "attention.scales must not be empty");
    for (double s : attention.scales) require(s > 0.0, "attention.scales must be > 0");
    require(attention.relevance_threshold >= 0.0 && attention.relevance_threshold <= 1.0,
            "attention.relevance_threshold must be in [0,1]");
    require(attention.min_run >= 1, "attention.min_run must be >= 1");
    require(motion.lambda_b > 0.0, "motion.lambda_b must be > 0");
    require(motion.theta_b > 0.0, "motion.theta_b must be > 0");
    require(appearance.gmm.components >= 1, "appearance.components must be >= 1");
    require(appearance.gmm.iterations >= 0, "appearance.iterations must be >= 0");
    require(appearance.gmm.variance_floor > 0.0, "appearance.variance_floor must be > 0");
    require(appearance.attention_threshold >= 0.0 && appearance.attention_threshold <= 1.0,
            "appearance.attention_threshold must be in [0,1]");
    require(energy.lambda_a >= 0.0 && energy.lambda_m >= 0.0 && energy.lambda_c >= 0.0,
            "energy lambdas must be >= 0");
    require(energy.epsilon > 0.0 && energy.epsilon < 0.5, "energy.epsilon must be in (0, 0.5)");
    require(energy.gamma >= 0.0, "energy.gamma must be >= 0");
    require(flow.block >= 4, "flow.block must be >= 4");
    require(flow.radius >= 1, "flow.radius must be >= 1");
    require(retrieval.max_keyframes >= 0, "retrieval.max_keyframes must be >= 0");
    require(retrieval.max_videos_per_class >= 0, "retrieval.max_videos_per_class must be >= 0");
    require(retrieval.window_seconds >= 0.0, "retrieval.window_seconds must be >= 0");
    require(fuse_background_threshold >= 0.0 && fuse_background_threshold <= 1.0,
            "fuse.background_threshold must be in [0,1]");
    require(jobs >= 1, "jobs must be >= 1");
}

nlohmann::json PipelineConfig::to_json() const {
    return {
        {"superpixel",
         {{"region_size", slic.region_size},
          {"compactness", slic.compactness},
          {"iterations", slic.iterations},
          {"color_scale", slic.color_scale}}},
        {"attention",
         {{"scales", attention.scales},
          {"relevance_threshold", attention.relevance_threshold},
          {"min_run", attention.min_run}}},
        {"motion", {{"lambda_b", motion.lambda_b}, {"theta_b", motion.theta_b}}},
        {"appearance",
         {{"components", appearance.gmm.components},
          {"iterations", appearance.gmm.iterations},
          {"seed", appearance.gmm.seed},
          {"variance_floor", appearance.gmm.variance_floor},
          {"attention_threshold", appearance.attention_threshold}}},
        {"energy",
         {{"lambda_a", energy.lambda_a},
          {"lambda_m", energy.lambda_m},
          {"lambda_c", energy.lambda_c},
          {"epsilon", energy.epsilon},
          {"gamma", energy.gamma}}},
        {"flow", {{"allow_estimated", flow.allow_estimated}, {"block", flow.block}, {"radius", flow.radius}}},
        {"retrieval",
         {{"thumbnail_threshold", retrieval.thumbnail_threshold},
          {"keyframe_threshold", retrieval.keyframe_threshold},
          {"max_keyframes", retrieval.max_keyframes},
          {"window_seconds", retrieval.window_seconds},
          {"max_videos_per_class", retrieval.max_videos_per_class}}},
        {"fuse", {{"background_threshold", fuse_background_threshold}}},
        {"jobs", jobs},
    };
}

nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(origin + ": " + e.what());
    }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path.string());
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void apply_override(nlohmann::json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("override must look like section.key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
        value = raw;
    }
    nlohmann::json* node = &config;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw InputError("override has an empty key: " + path);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

}  // namespace vidcut
