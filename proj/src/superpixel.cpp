#include "vidcut/superpixel.hpp"

#include "vidcut/error.hpp"
#include "vidcut/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace vidcut {

namespace {

constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

std::array<std::uint8_t, 3> rgb_at(const Image& img, std::size_t i) {
    if (img.channels == 3) return {img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2]};
    const auto g = img.data[i];
    return {g, g, g};
}

void check_image(const Image& image) {
    if (image.width < 1 || image.height < 1) throw InputError("superpixel: empty image");
    if (image.channels != 1 && image.channels != 3) throw InputError("superpixel: image must have 1 or 3 channels");
}

// Labels each 4-connected run of equal input labels; returns component ids
// numbered in raster order of first pixel.
std::vector<std::uint32_t> connected_components(int w, int h, const std::vector<std::uint32_t>& labels,
                                                std::vector<std::uint32_t>& sizes) {
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<std::uint32_t> comp(n, kUnset);
    std::vector<std::size_t> stack;
    sizes.clear();
    for (std::size_t start = 0; start < n; ++start) {
        if (comp[start] != kUnset) continue;
        const auto id = static_cast<std::uint32_t>(sizes.size());
        const auto lab = labels[start];
        std::uint32_t size = 0;
        comp[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            ++size;
            const int x = static_cast<int>(p % w);
            const int y = static_cast<int>(p / w);
            auto visit = [&](std::size_t q) {
                if (comp[q] == kUnset && labels[q] == lab) {
                    comp[q] = id;
                    stack.push_back(q);
                }
            };
            if (x > 0) visit(p - 1);
            if (x + 1 < w) visit(p + 1);
            if (y > 0) visit(p - w);
            if (y + 1 < h) visit(p + w);
        }
        sizes.push_back(size);
    }
    return comp;
}

// Keeps the largest component of every label and merges each remaining
// (orphan) component into the adjacent resolved region whose main component
// is largest.
std::vector<std::uint32_t> enforce_connectivity(int w, int h, const std::vector<std::uint32_t>& labels) {
    std::vector<std::uint32_t> sizes;
    const auto comp = connected_components(w, h, labels, sizes);
    const std::size_t ncomp = sizes.size();

    std::vector<std::uint32_t> comp_label(ncomp);
    for (std::size_t p = 0; p < comp.size(); ++p) comp_label[comp[p]] = labels[p];

    // main component per label: largest, earliest in raster order on ties
    std::map<std::uint32_t, std::uint32_t> main_of;
    for (std::uint32_t c = 0; c < ncomp; ++c) {
        auto [it, inserted] = main_of.try_emplace(comp_label[c], c);
        if (!inserted && sizes[c] > sizes[it->second]) it->second = c;
    }

    // region id per component; kUnset while an orphan is unresolved
    std::vector<std::uint32_t> region(ncomp, kUnset);
    std::vector<std::uint64_t> region_size;
    for (std::uint32_t c = 0; c < ncomp; ++c) {
        if (main_of.at(comp_label[c]) == c) {
            region[c] = static_cast<std::uint32_t>(region_size.size());
            region_size.push_back(sizes[c]);
        }
    }

    std::vector<std::vector<std::uint32_t>> neighbors(ncomp);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * w + x;
            if (x + 1 < w && comp[p] != comp[p + 1]) {
                neighbors[comp[p]].push_back(comp[p + 1]);
                neighbors[comp[p + 1]].push_back(comp[p]);
            }
            if (y + 1 < h && comp[p] != comp[p + w]) {
                neighbors[comp[p]].push_back(comp[p + w]);
                neighbors[comp[p + w]].push_back(comp[p]);
            }
        }
    }

    bool pending = true;
    while (pending) {
        pending = false;
        bool progressed = false;
        for (std::uint32_t c = 0; c < ncomp; ++c) {
            if (region[c] != kUnset) continue;
            std::uint32_t best = kUnset;
            for (auto nb : neighbors[c]) {
                const auto r = region[nb];
                if (r == kUnset) continue;
                if (best == kUnset || region_size[r] > region_size[best] ||
                    (region_size[r] == region_size[best] && r < best))
                    best = r;
            }
            if (best == kUnset) {
                pending = true;
                continue;
            }
            // sizes stay frozen so one region cannot snowball through chains of orphans
            region[c] = best;
            progressed = true;
        }
        if (pending && !progressed) throw InvariantError("connectivity enforcement did not converge");
    }

    std::vector<std::uint32_t> out(comp.size());
    for (std::size_t p = 0; p < comp.size(); ++p) out[p] = region[comp[p]];
    return out;
}

}  // namespace

SuperpixelPartition partition_from_labels(const Image& image, std::vector<std::uint32_t> labels) {
    check_image(image);
    const std::size_t n = image.pixel_count();
    if (labels.size() != n) throw InputError("partition: label map size does not match image");

    std::map<std::uint32_t, std::uint32_t> remap;
    for (auto& l : labels) {
        auto [it, inserted] = remap.try_emplace(l, static_cast<std::uint32_t>(remap.size()));
        l = it->second;
    }

    SuperpixelPartition p;
    p.width = image.width;
    p.height = image.height;
    p.regions.resize(remap.size());
    std::vector<std::array<double, 5>> sums(remap.size(), std::array<double, 5>{});
    for (std::size_t i = 0; i < n; ++i) {
        const auto l = labels[i];
        const auto c = rgb_at(image, i);
        auto& s = sums[l];
        s[0] += c[0];
        s[1] += c[1];
        s[2] += c[2];
        s[3] += static_cast<double>(i % image.width) + 0.5;
        s[4] += static_cast<double>(i / image.width) + 0.5;
        ++p.regions[l].pixel_count;
    }
    for (std::size_t r = 0; r < p.regions.size(); ++r) {
        auto& reg = p.regions[r];
        const double cnt = reg.pixel_count;
        for (int k = 0; k < 3; ++k) reg.mean_rgb[k] = sums[r][k] / cnt / 255.0;
        reg.centroid = {sums[r][3] / cnt, sums[r][4] / cnt};
    }
    p.labels = std::move(labels);
    return p;
}

void validate_partition(const SuperpixelPartition& p, const Image& image) {
    const std::size_t n = static_cast<std::size_t>(p.width) * p.height;
    if (p.labels.size() != n) throw InvariantError("partition: label map size mismatch");
    std::vector<std::uint32_t> seen(p.count(), 0);
    for (auto l : p.labels) {
        if (l >= p.count()) throw InvariantError("partition: label out of range");
        ++seen[l];
    }
    for (std::size_t r = 0; r < p.count(); ++r) {
        if (seen[r] == 0) throw InvariantError("partition: empty region");
        if (seen[r] != p.regions[r].pixel_count) throw InvariantError("partition: pixel count mismatch");
    }
    std::vector<std::uint32_t> sizes;
    connected_components(p.width, p.height, p.labels, sizes);
    if (sizes.size() != p.count()) throw InvariantError("partition: region is not 4-connected");

    const auto recomputed = partition_from_labels(image, p.labels);
    for (std::size_t r = 0; r < p.count(); ++r) {
        if (recomputed.regions[r].mean_rgb != p.regions[r].mean_rgb ||
            recomputed.regions[r].centroid != p.regions[r].centroid)
            throw InvariantError("partition: stored stats differ from label map");
    }
}

SuperpixelPartition slic(const Image& image, const SlicParams& params) {
    check_image(image);
    if (params.region_size < 2) throw InputError("slic: region_size must be >= 2");
    if (!(params.compactness > 0.0)) throw InputError("slic: compactness must be > 0");

    const int w = image.width;
    const int h = image.height;
    const std::size_t n = image.pixel_count();
    const double S = params.region_size;

    // planar colors, scaled so compactness keeps its customary range
    std::vector<float> r(n), g(n), b(n);
    const float scale = static_cast<float>(params.color_scale / 255.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = rgb_at(image, i);
        r[i] = static_cast<float>(c[0]) * scale;
        g[i] = static_cast<float>(c[1]) * scale;
        b[i] = static_cast<float>(c[2]) * scale;
    }

    const int nx = std::max(1, static_cast<int>(std::lround(w / S)));
    const int ny = std::max(1, static_cast<int>(std::lround(h / S)));
    const double step_x = static_cast<double>(w) / nx;
    const double step_y = static_cast<double>(h) / ny;

    struct Center {
        float r, g, b, x, y;
    };
    std::vector<Center> centers;
    centers.reserve(static_cast<std::size_t>(nx) * ny);

    auto gradient = [&](int x, int y) {
        const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
        const int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
        auto d2 = [&](std::size_t a, std::size_t c) {
            const float dr = r[a] - r[c], dg = g[a] - g[c], db = b[a] - b[c];
            return dr * dr + dg * dg + db * db;
        };
        const auto at = [w](int xx, int yy) { return static_cast<std::size_t>(yy) * w + xx; };
        return d2(at(xr, y), at(xl, y)) + d2(at(x, yd), at(x, yu));
    };

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double cx = (i + 0.5) * step_x;
            const double cy = (j + 0.5) * step_y;
            int px = std::min(static_cast<int>(cx), w - 1);
            int py = std::min(static_cast<int>(cy), h - 1);
            // move off strong edges: lowest gradient in the 3x3 neighborhood,
            // kept in place unless a neighbor is strictly lower
            float best = gradient(px, py);
            int bx = px, by = py;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = px + dx, yy = py + dy;
                    if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
                    const float gval = gradient(xx, yy);
                    if (gval < best) {
                        best = gval;
                        bx = xx;
                        by = yy;
                    }
                }
            }
            Center c{};
            if (bx != px || by != py) {
                c.x = static_cast<float>(bx + 0.5);
                c.y = static_cast<float>(by + 0.5);
            } else {
                c.x = static_cast<float>(cx);
                c.y = static_cast<float>(cy);
            }
            const std::size_t q = static_cast<std::size_t>(by) * w + bx;
            c.r = r[q];
            c.g = g[q];
            c.b = b[q];
            centers.push_back(c);
        }
    }

    // initial labels from the seeding grid; pixels outside every search
    // window keep their previous label
    std::vector<std::int32_t> label(n);
    for (int y = 0; y < h; ++y) {
        const int j = std::min(static_cast<int>(y / step_y), ny - 1);
        for (int x = 0; x < w; ++x) {
            const int i = std::min(static_cast<int>(x / step_x), nx - 1);
            label[static_cast<std::size_t>(y) * w + x] = j * nx + i;
        }
    }

    const auto& kernels = simd::active();
    const float spatial_weight = static_cast<float>((params.compactness / S) * (params.compactness / S));
    const double radius = std::max({S, step_x, step_y});
    std::vector<float> dist(n);

    for (int iter = 0; iter < params.iterations; ++iter) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<float>::infinity());
        for (std::size_t k = 0; k < centers.size(); ++k) {
            const auto& c = centers[k];
            const int x0 = std::max(0, static_cast<int>(std::floor(c.x - radius)));
            const int x1 = std::min(w, static_cast<int>(std::ceil(c.x + radius)));
            const int y0 = std::max(0, static_cast<int>(std::floor(c.y - radius)));
            const int y1 = std::min(h, static_cast<int>(std::ceil(c.y + radius)));
            if (x0 >= x1) continue;
            const std::size_t len = static_cast<std::size_t>(x1 - x0);
            for (int y = y0; y < y1; ++y) {
                const std::size_t off = static_cast<std::size_t>(y) * w + x0;
                const float dy = (static_cast<float>(y) + 0.5f) - c.y;
                simd::SlicRow row;
                row.r = std::span<const float>(r).subspan(off, len);
                row.g = std::span<const float>(g).subspan(off, len);
                row.b = std::span<const float>(b).subspan(off, len);
                row.best = std::span<float>(dist).subspan(off, len);
                row.label = std::span<std::int32_t>(label).subspan(off, len);
                row.x0 = static_cast<float>(x0) + 0.5f;
                row.dy2 = dy * dy;
                row.cr = c.r;
                row.cg = c.g;
                row.cb = c.b;
                row.cx = c.x;
                row.spatial_weight = spatial_weight;
                row.center = static_cast<std::int32_t>(k);
                kernels.slic_assign_row(row);
            }
        }

        std::vector<std::array<double, 6>> acc(centers.size(), std::array<double, 6>{});
        for (std::size_t i = 0; i < n; ++i) {
            auto& a = acc[static_cast<std::size_t>(label[i])];
            a[0] += r[i];
            a[1] += g[i];
            a[2] += b[i];
            a[3] += static_cast<double>(i % w) + 0.5;
            a[4] += static_cast<double>(i / w) + 0.5;
            a[5] += 1.0;
        }
        for (std::size_t k = 0; k < centers.size(); ++k) {
            const auto& a = acc[k];
            if (a[5] == 0.0) continue;
            centers[k] = {static_cast<float>(a[0] / a[5]), static_cast<float>(a[1] / a[5]),
                          static_cast<float>(a[2] / a[5]), static_cast<float>(a[3] / a[5]),
                          static_cast<float>(a[4] / a[5])};
        }
    }

    std::vector<std::uint32_t> raw(label.begin(), label.end());
    return partition_from_labels(image, enforce_connectivity(w, h, raw));
}

std::vector<RegionAdjacency> region_adjacency(const SuperpixelPartition& p) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> counts;
    const int w = p.width, h = p.height;
    auto add = [&](std::uint32_t a, std::uint32_t b) {
        if (a == b) return;
        if (a > b) std::swap(a, b);
        ++counts[{a, b}];
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto l = p.at(x, y);
            if (x + 1 < w) add(l, p.at(x + 1, y));
            if (y + 1 < h) add(l, p.at(x, y + 1));
        }
    }
    std::vector<RegionAdjacency> out;
    out.reserve(counts.size());
    for (const auto& [key, len] : counts) out.push_back({key.first, key.second, len});
    return out;
}

Image16 partition_to_image16(const SuperpixelPartition& p) {
    if (p.count() > 65536) throw InputError("partition: too many regions for a 16-bit label dump");
    Image16 img{p.width, p.height, {}};
    img.data.assign(p.labels.begin(), p.labels.end());
    return img;
}

nlohmann::json partition_stats_json(const SuperpixelPartition& p) {
    nlohmann::json regions = nlohmann::json::array();
    for (std::size_t i = 0; i < p.count(); ++i) {
        const auto& r = p.regions[i];
        regions.push_back({{"id", i},
                           {"pixel_count", r.pixel_count},
                           {"mean_rgb", r.mean_rgb},
                           {"centroid", r.centroid}});
    }
    return {{"width", p.width}, {"height", p.height}, {"count", p.count()}, {"regions", regions}};
}

}  // namespace vidcut
