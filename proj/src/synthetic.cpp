#include "vidcut/synthetic.hpp"

#include "vidcut/config.hpp"
#include "vidcut/error.hpp"
#include "vidcut/pipeline.hpp"

#include <cmath>
#include <random>
#include <string>

namespace vidcut {

namespace {

// Checkerboard of two colors, cell size in pixels, in the given coordinate frame.
bool checker(double x, double y, double cell) {
    const auto cx = static_cast<long>(std::floor(x / cell));
    const auto cy = static_cast<long>(std::floor(y / cell));
    return ((cx + cy) & 1) != 0;
}

}  // namespace

SyntheticClip make_synthetic_clip(const SyntheticParams& p) {
    if (p.width < 8 || p.height < 8 || p.frames < 1 || !(p.radius > 0.0) || p.scales.empty())
        throw InputError("gen-synthetic: invalid parameters");
    for (double s : p.scales)
        if (!(s > 0.0)) throw InputError("gen-synthetic: scales must be > 0");

    SyntheticClip clip;
    const int W = p.width, H = p.height;

    std::mt19937_64 rng(p.seed);
    std::vector<int> noise(static_cast<std::size_t>(W) * H);
    for (auto& n : noise) n = static_cast<int>(rng() % 17) - 8;

    const double r2 = p.radius * p.radius;
    for (int t = 0; t < p.frames; ++t) {
        const double cx = p.start_x + p.velocity_x * t;
        const double cy = p.start_y + p.velocity_y * t;
        Image img(W, H, 3);
        SegmentationMask gt(W, H, 0);
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
                const int nz = noise[static_cast<std::size_t>(y) * W + x];
                int rgb[3];
                if (dx * dx + dy * dy <= r2) {
                    gt.at(x, y) = 1;
                    const bool c = checker(dx + 64.0, dy + 64.0, 4.0);
                    rgb[0] = c ? 230 : 250;
                    rgb[1] = c ? 90 : 150;
                    rgb[2] = c ? 40 : 70;
                } else {
                    const bool c = checker(x, y, 6.0);
                    rgb[0] = (c ? 40 : 60) + nz;
                    rgb[1] = (c ? 95 : 120) + nz;
                    rgb[2] = (c ? 160 : 190) + nz;
                }
                for (int k = 0; k < 3; ++k) img.at(x, y, k) = static_cast<std::uint8_t>(rgb[k]);
            }
        }
        clip.frames.push_back(std::move(img));
        clip.truth.push_back(std::move(gt));

        if (t + 1 < p.frames) {
            FlowField f(W, H);
            const auto& mask = clip.truth.back();
            for (std::size_t i = 0; i < mask.values.size(); ++i) {
                if (!mask.values[i]) continue;
                f.u[i] = static_cast<float>(p.velocity_x);
                f.v[i] = static_cast<float>(p.velocity_y);
            }
            clip.flows.push_back(std::move(f));
        }

        // channel 0: Gaussian bump on the disk, channel 1: constant bias
        const double sigma = 0.75 * p.radius;
        std::vector<Tensor> per_scale;
        for (double s : p.scales) {
            const auto gw = static_cast<std::uint32_t>(std::max(1L, std::lround(W * s / 8.0)));
            const auto gh = static_cast<std::uint32_t>(std::max(1L, std::lround(H * s / 8.0)));
            Tensor feat({gh, gw, 2});
            for (std::uint32_t j = 0; j < gh; ++j) {
                for (std::uint32_t i = 0; i < gw; ++i) {
                    const double px = (i + 0.5) * W / gw - cx;
                    const double py = (j + 0.5) * H / gh - cy;
                    const std::size_t o = (static_cast<std::size_t>(j) * gw + i) * 2;
                    feat[o] = static_cast<float>(std::exp(-(px * px + py * py) / (2.0 * sigma * sigma)));
                    feat[o + 1] = 1.0f;
                }
            }
            per_scale.push_back(std::move(feat));
        }
        clip.features.push_back(std::move(per_scale));
    }

    clip.weights = Tensor({2, 1});
    clip.weights[0] = 1.0f;
    clip.weights[1] = -0.05f;
    clip.scores.classes = {"disk"};
    clip.scores.frames.assign(p.frames, std::vector<float>{p.score});
    return clip;
}

void write_synthetic_clip(const SyntheticClip& clip, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t t = 0; t < clip.frames.size(); ++t) {
        const int ti = static_cast<int>(t);
        write_netpbm(dir / frame_name("frame", ti, ".ppm"), clip.frames[t]);
        Image gt(clip.truth[t].width, clip.truth[t].height, 1);
        gt.data = clip.truth[t].values;
        write_netpbm(dir / frame_name("gt", ti, ".pgm"), gt);
        for (std::size_t s = 0; s < clip.features[t].size(); ++s)
            write_tensor(dir / (frame_name("feat", ti, "") + "_s" + std::to_string(s) + ".tnsr"), clip.features[t][s]);
    }
    for (std::size_t t = 0; t < clip.flows.size(); ++t)
        write_flo(dir / frame_name("flow", static_cast<int>(t), ".flo"), clip.flows[t]);
    write_tensor(dir / "weights.tnsr", clip.weights);
    write_json_file(dir / "scores.json", clip.scores.to_json());
}

}  // namespace vidcut
