#include "vidcut/attention.hpp"

#include "vidcut/error.hpp"
#include "vidcut/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace vidcut {

AttentionMap cam_raw(const Tensor& features, const Tensor& weights, int class_id) {
    if (features.dims.size() != 3) throw InputError("cam: features must be (h, w, d)");
    if (weights.dims.size() != 2) throw InputError("cam: weights must be (d, C)");
    const auto h = features.dims[0], w = features.dims[1], d = features.dims[2];
    if (weights.dims[0] != d) throw InputError("cam: feature depth does not match weight rows");
    const auto classes = weights.dims[1];
    if (class_id < 0 || static_cast<std::uint32_t>(class_id) >= classes) throw InputError("cam: class out of range");

    std::vector<float> column(d);
    for (std::uint32_t k = 0; k < d; ++k) column[k] = weights[static_cast<std::size_t>(k) * classes + class_id];

    const auto& kernels = simd::active();
    AttentionMap out(static_cast<int>(w), static_cast<int>(h));
    const std::span<const float> feats(features.data);
    for (std::size_t p = 0; p < out.values.size(); ++p)
        out.values[p] = kernels.dot_f32(feats.subspan(p * d, d), column);
    return out;
}

AttentionMap cam(const Tensor& features, const Tensor& weights, int class_id) {
    auto out = cam_raw(features, weights, class_id);
    for (auto& v : out.values) v = std::max(v, 0.0f);
    return out;
}

AttentionMap resize_bilinear(const AttentionMap& map, int width, int height) {
    if (map.width < 1 || map.height < 1 || width < 1 || height < 1) throw InputError("resize: empty map");
    if (map.width == width && map.height == height) return map;
    AttentionMap out(width, height);
    const double sx = static_cast<double>(map.width) / width;
    const double sy = static_cast<double>(map.height) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(map.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, map.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(map.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, map.width - 1);
            const double wx = fx - x0;
            const double top = map.at(x0, y0) * (1.0 - wx) + map.at(x1, y0) * wx;
            const double bottom = map.at(x0, y1) * (1.0 - wx) + map.at(x1, y1) * wx;
            out.at(x, y) = static_cast<float>(top * (1.0 - wy) + bottom * wy);
        }
    }
    return out;
}

void normalize_max(AttentionMap& map) {
    float peak = 0.0f;
    for (float v : map.values) peak = std::max(peak, v);
    if (peak <= 0.0f) return;
    for (auto& v : map.values) v /= peak;
}

AttentionMap fuse_multiscale(std::span<const AttentionMap> maps, int width, int height) {
    if (maps.empty()) throw InputError("fuse_multiscale: no attention maps");
    AttentionMap out(width, height, 0.0f);
    bool first = true;
    for (const auto& m : maps) {
        const auto resized = resize_bilinear(m, width, height);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] = first ? resized.values[i] : std::max(out.values[i], resized.values[i]);
        first = false;
    }
    normalize_max(out);
    return out;
}

std::vector<double> superpixel_attention(const AttentionMap& att, const SuperpixelPartition& p) {
    if (att.width != p.width || att.height != p.height) throw InputError("superpixel_attention: size mismatch");
    std::vector<double> sum(p.count(), 0.0);
    for (std::size_t i = 0; i < p.labels.size(); ++i) sum[p.labels[i]] += att.values[i];
    double peak = 0.0;
    for (std::size_t r = 0; r < sum.size(); ++r) {
        sum[r] /= p.regions[r].pixel_count;
        peak = std::max(peak, sum[r]);
    }
    for (auto& v : sum) v = peak > 0.0 ? v / peak : 0.0;
    return sum;
}

AttentionMap attention_from_tensor(const Tensor& t) {
    const bool plane = t.dims.size() == 2 || (t.dims.size() == 3 && t.dims[2] == 1);
    if (!plane) throw InputError("attention tensor must be (h, w)");
    AttentionMap m(static_cast<int>(t.dims[1]), static_cast<int>(t.dims[0]));
    m.values = t.data;
    for (float v : m.values)
        if (v < 0.0f) throw InputError("attention tensor has negative values");
    return m;
}

Tensor attention_to_tensor(const AttentionMap& map) {
    Tensor t;
    t.dims = {static_cast<std::uint32_t>(map.height), static_cast<std::uint32_t>(map.width)};
    t.data = map.values;
    return t;
}

ClassScores ClassScores::from_json(const nlohmann::json& j) {
    ClassScores s;
    try {
        s.classes = j.at("classes").get<std::vector<std::string>>();
        s.frames = j.at("scores").get<std::vector<std::vector<float>>>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("scores: ") + e.what());
    }
    for (const auto& f : s.frames) {
        if (f.size() != s.classes.size()) throw InputError("scores: vector length differs from class count");
        for (float v : f)
            if (!std::isfinite(v)) throw InputError("scores: non-finite score");
    }
    return s;
}

nlohmann::json ClassScores::to_json() const { return {{"classes", classes}, {"scores", frames}}; }

int ClassScores::class_index(const std::string& name_or_id) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i] == name_or_id) return static_cast<int>(i);
    const bool numeric = !name_or_id.empty() && name_or_id.size() <= 9 &&
                         std::all_of(name_or_id.begin(), name_or_id.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (numeric) {
        const int id = std::stoi(name_or_id);
        if (id < static_cast<int>(classes.size())) return id;
    }
    throw InputError("scores: unknown class '" + name_or_id + "'");
}

std::vector<RelevantInterval> relevance_filter(const ClassScores& scores, int class_id, double threshold,
                                               int min_run) {
    if (threshold < 0.0 || threshold > 1.0) throw InputError("relevance_filter: threshold must be in [0,1]");
    if (min_run < 1) throw InputError("relevance_filter: min_run must be >= 1");
    if (class_id < 0 || static_cast<std::size_t>(class_id) >= scores.classes.size())
        throw InputError("relevance_filter: class out of range");

    // scores are float; compare at that precision so a stored 0.8 is not above 0.8
    const auto thr = static_cast<float>(threshold);
    std::vector<RelevantInterval> out;
    const int n = static_cast<int>(scores.frames.size());
    int start = -1;
    for (int t = 0; t <= n; ++t) {
        const bool on = t < n && scores.frames[t][class_id] > thr;
        if (on && start < 0) start = t;
        if (!on && start >= 0) {
            if (t - start >= min_run) out.push_back({start, t - 1, class_id});
            start = -1;
        }
    }
    return out;
}

}  // namespace vidcut
