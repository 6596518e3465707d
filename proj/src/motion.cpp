#include "vidcut/motion.hpp"

#include "vidcut/error.hpp"

#include <array>
#include <cmath>

namespace vidcut {

namespace {

// d/dx and d/dy of a scalar field, central inside and one-sided on borders
float ddx(const std::vector<float>& f, int w, int x, int y) {
    if (w < 2) return 0.0f;
    const std::size_t row = static_cast<std::size_t>(y) * w;
    if (x == 0) return f[row + 1] - f[row];
    if (x == w - 1) return f[row + x] - f[row + x - 1];
    return 0.5f * (f[row + x + 1] - f[row + x - 1]);
}

float ddy(const std::vector<float>& f, int w, int h, int x, int y) {
    if (h < 2) return 0.0f;
    auto at = [&](int yy) { return f[static_cast<std::size_t>(yy) * w + x]; };
    if (y == 0) return at(1) - at(0);
    if (y == h - 1) return at(y) - at(y - 1);
    return 0.5f * (at(y + 1) - at(y - 1));
}

}  // namespace

std::vector<float> flow_gradient_magnitude(const FlowField& flow) {
    const int w = flow.width, h = flow.height;
    std::vector<float> mag(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double ux = ddx(flow.u, w, x, y), uy = ddy(flow.u, w, h, x, y);
            const double vx = ddx(flow.v, w, x, y), vy = ddy(flow.v, w, h, x, y);
            mag[flow.index(x, y)] = static_cast<float>(std::sqrt(ux * ux + uy * uy + vx * vx + vy * vy));
        }
    }
    return mag;
}

BoundaryMap motion_boundary(const FlowField& flow, const MotionParams& params) {
    if (!(params.theta_b > 0.0)) throw InputError("motion_boundary: theta_b must be > 0");
    const auto mag = flow_gradient_magnitude(flow);
    BoundaryMap out{flow.width, flow.height, std::vector<std::uint8_t>(mag.size(), 0)};
    for (std::size_t i = 0; i < mag.size(); ++i)
        out.values[i] = (1.0 - std::exp(-params.lambda_b * mag[i])) > params.theta_b ? 1 : 0;
    return out;
}

InsideOutsideMap inside_outside(const BoundaryMap& boundary) {
    const int w = boundary.width, h = boundary.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (boundary.values.size() != n) throw InputError("inside_outside: boundary map size mismatch");

    constexpr std::array<std::array<int, 2>, 8> kDirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                                       {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
    std::vector<std::uint8_t> crossings(n, 0);
    std::vector<std::uint8_t> hit(n);
    for (const auto& [dx, dy] : kDirs) {
        // hit(p) = boundary(p + d) || hit(p + d); sweep so p + d is done first
        const int y_begin = dy > 0 ? h - 1 : 0, y_end = dy > 0 ? -1 : h, y_step = dy > 0 ? -1 : 1;
        const int x_begin = dx > 0 ? w - 1 : 0, x_end = dx > 0 ? -1 : w, x_step = dx > 0 ? -1 : 1;
        for (int y = y_begin; y != y_end; y += y_step) {
            for (int x = x_begin; x != x_end; x += x_step) {
                const int nx = x + dx, ny = y + dy;
                std::uint8_t v = 0;
                if (nx >= 0 && ny >= 0 && nx < w && ny < h) {
                    const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
                    v = boundary.values[q] | hit[q];
                }
                hit[static_cast<std::size_t>(y) * w + x] = v;
            }
        }
        for (std::size_t i = 0; i < n; ++i) crossings[i] += hit[i];
    }

    InsideOutsideMap out{w, h, std::vector<float>(n)};
    for (std::size_t i = 0; i < n; ++i)
        out.inside_prob[i] = boundary.values[i] ? 1.0f : static_cast<float>(crossings[i]) / 8.0f;
    return out;
}

std::vector<double> motion_term(const InsideOutsideMap& iom, const SuperpixelPartition& p) {
    if (iom.width != p.width || iom.height != p.height) throw InputError("motion_term: size mismatch");
    std::vector<double> sum(p.count(), 0.0);
    for (std::size_t i = 0; i < p.labels.size(); ++i) sum[p.labels[i]] += iom.inside_prob[i];
    for (std::size_t r = 0; r < sum.size(); ++r) sum[r] /= p.regions[r].pixel_count;
    return sum;
}

Tensor inside_outside_to_tensor(const InsideOutsideMap& iom) {
    Tensor t;
    t.dims = {static_cast<std::uint32_t>(iom.height), static_cast<std::uint32_t>(iom.width)};
    t.data = iom.inside_prob;
    return t;
}

}  // namespace vidcut
