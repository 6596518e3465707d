#include "vidcut/retrieval.hpp"

#include "vidcut/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace vidcut {

CorpusManifest CorpusManifest::from_json(const nlohmann::json& j) {
    CorpusManifest m;
    try {
        for (const auto& v : j.at("videos")) {
            CandidateVideo c;
            c.id = v.at("id").get<std::string>();
            c.keyword = v.at("class").get<std::string>();
            c.thumbnail_score = v.at("thumbnail_score").get<double>();
            c.frame_rate = v.at("frame_rate").get<double>();
            c.duration = v.at("duration").get<double>();
            for (const auto& k : v.at("keyframes"))
                c.keyframes.push_back({k.at("t").get<double>(), k.at("score").get<double>()});
            m.videos.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("manifest: ") + e.what());
    }
    for (const auto& v : m.videos) {
        if (!std::isfinite(v.thumbnail_score)) throw InputError("manifest: non-finite thumbnail score for " + v.id);
        if (!(v.duration >= 0.0) || !std::isfinite(v.duration)) throw InputError("manifest: bad duration for " + v.id);
        if (!(v.frame_rate > 0.0)) throw InputError("manifest: frame_rate must be > 0 for " + v.id);
        for (const auto& k : v.keyframes) {
            if (!std::isfinite(k.score)) throw InputError("manifest: non-finite key-frame score for " + v.id);
            if (!(k.time >= 0.0 && k.time <= v.duration))
                throw InputError("manifest: key-frame timestamp outside [0, duration] for " + v.id);
        }
    }
    return m;
}

nlohmann::json CorpusManifest::to_json() const {
    nlohmann::json videos_json = nlohmann::json::array();
    for (const auto& v : videos) {
        nlohmann::json kf = nlohmann::json::array();
        for (const auto& k : v.keyframes) kf.push_back({{"t", k.time}, {"score", k.score}});
        videos_json.push_back({{"id", v.id},
                               {"class", v.keyword},
                               {"thumbnail_score", v.thumbnail_score},
                               {"frame_rate", v.frame_rate},
                               {"duration", v.duration},
                               {"keyframes", kf}});
    }
    return {{"videos", videos_json}};
}

std::vector<ClipSelection> retrieval_filter(const CorpusManifest& manifest, const RetrievalParams& params) {
    std::vector<std::string> class_order;
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < manifest.videos.size(); ++i) {
        const auto& v = manifest.videos[i];
        if (!(v.thumbnail_score > params.thumbnail_threshold)) continue;
        auto [it, inserted] = by_class.try_emplace(v.keyword);
        if (inserted) class_order.push_back(v.keyword);
        it->second.push_back(i);
    }

    std::vector<ClipSelection> out;
    for (const auto& keyword : class_order) {
        auto& ids = by_class[keyword];
        std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
            return manifest.videos[a].thumbnail_score > manifest.videos[b].thumbnail_score;
        });
        if (ids.size() > static_cast<std::size_t>(std::max(0, params.max_videos_per_class)))
            ids.resize(static_cast<std::size_t>(std::max(0, params.max_videos_per_class)));

        for (auto idx : ids) {
            const auto& v = manifest.videos[idx];
            std::vector<KeyFrame> kept;
            for (const auto& k : v.keyframes)
                if (k.score > params.keyframe_threshold) kept.push_back(k);
            std::stable_sort(kept.begin(), kept.end(), [](const KeyFrame& a, const KeyFrame& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.time < b.time;
            });
            if (kept.size() > static_cast<std::size_t>(std::max(0, params.max_keyframes)))
                kept.resize(static_cast<std::size_t>(std::max(0, params.max_keyframes)));
            if (kept.empty()) continue;

            std::vector<ClipWindow> raw;
            for (const auto& k : kept)
                raw.push_back({std::max(0.0, k.time - params.window_seconds),
                               std::min(v.duration, k.time + params.window_seconds)});
            std::sort(raw.begin(), raw.end(), [](const ClipWindow& a, const ClipWindow& b) {
                return a.start < b.start || (a.start == b.start && a.end < b.end);
            });
            ClipSelection sel{v.id, v.keyword, {}, static_cast<int>(kept.size())};
            for (const auto& w : raw) {
                if (!sel.windows.empty() && w.start <= sel.windows.back().end)
                    sel.windows.back().end = std::max(sel.windows.back().end, w.end);
                else
                    sel.windows.push_back(w);
            }
            out.push_back(std::move(sel));
        }
    }
    return out;
}

nlohmann::json selections_to_json(const std::vector<ClipSelection>& selections) {
    nlohmann::json clips = nlohmann::json::array();
    for (const auto& s : selections) {
        nlohmann::json windows = nlohmann::json::array();
        for (const auto& w : s.windows) windows.push_back({w.start, w.end});
        clips.push_back(
            {{"video_id", s.video_id}, {"class", s.keyword}, {"keyframes", s.keyframe_count}, {"windows", windows}});
    }
    return {{"clips", clips}};
}

}  // namespace vidcut
