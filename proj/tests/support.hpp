#pragma once

// Random input generators and small fixtures shared by the test binaries.

#include "vidcut/graphcut.hpp"
#include "vidcut/raster_io.hpp"
#include "vidcut/superpixel.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace vidcut::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return real(0.0, 1.0) < p; }
    std::uint8_t byte() { return static_cast<std::uint8_t>(integer(0, 255)); }

    Image image(int w, int h, int channels) {
        Image img(w, h, channels);
        for (auto& v : img.data) v = byte();
        return img;
    }

    // Random finite float with a wide spread of exponents and signs.
    float finite_float() {
        const double mag = std::pow(10.0, real(-6.0, 6.0));
        return static_cast<float>(coin() ? mag : -mag);
    }

    // Axis-aligned blocks of random size, renumbered; regions are rectangles
    // and therefore 4-connected.
    std::vector<std::uint32_t> block_labels(int w, int h, int max_block) {
        std::vector<int> xs{0}, ys{0};
        while (xs.back() < w) xs.push_back(std::min(w, xs.back() + integer(1, max_block)));
        while (ys.back() < h) ys.push_back(std::min(h, ys.back() + integer(1, max_block)));
        std::vector<std::uint32_t> labels(static_cast<std::size_t>(w) * h);
        const auto cols = static_cast<std::uint32_t>(xs.size() - 1);
        for (std::size_t j = 0; j + 1 < ys.size(); ++j)
            for (int y = ys[j]; y < ys[j + 1]; ++y)
                for (std::size_t i = 0; i + 1 < xs.size(); ++i)
                    for (int x = xs[i]; x < xs[i + 1]; ++x)
                        labels[static_cast<std::size_t>(y) * w + x] = static_cast<std::uint32_t>(j) * cols + static_cast<std::uint32_t>(i);
        return labels;
    }

    // Up to max_nodes nodes and max_edges distinct non-negative edges.
    EnergyModel energy_model(int max_nodes, int max_edges) {
        EnergyModel m;
        const int n = integer(1, max_nodes);
        for (int i = 0; i < n; ++i) m.unary.push_back({real(0.0, 10.0), real(0.0, 10.0)});
        if (n >= 2) {
            const int edges = integer(0, max_edges);
            for (int e = 0; e < edges; ++e) {
                const auto u = static_cast<std::uint32_t>(integer(0, n - 1));
                auto v = static_cast<std::uint32_t>(integer(0, n - 2));
                if (v >= u) ++v;
                m.pairwise.push_back({u, v, coin(0.1) ? 0.0 : real(0.0, 8.0)});
            }
        }
        return m;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("vidcut_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline Image uniform_image(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Image img(w, h, 3);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        img.data[3 * i] = r;
        img.data[3 * i + 1] = g;
        img.data[3 * i + 2] = b;
    }
    return img;
}

inline double mask_iou(const SegmentationMask& a, const SegmentationMask& b) {
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        inter += a.values[i] && b.values[i];
        uni += a.values[i] || b.values[i];
    }
    return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
}

}  // namespace vidcut::testing
