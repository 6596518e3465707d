#pragma once

#include "vidcut/raster_io.hpp"
#include "vidcut/superpixel.hpp"

#include <cstdint>
#include <vector>

namespace vidcut {

struct BoundaryMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;  // 1 = motion boundary

    std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

struct InsideOutsideMap {
    int width = 0;
    int height = 0;
    std::vector<float> inside_prob;  // in [0, 1]
};

struct MotionParams {
    double lambda_b = 0.5;
    double theta_b = 0.5;
};

// Frobenius norm of the flow Jacobian; central differences inside,
// one-sided differences on the border.
std::vector<float> flow_gradient_magnitude(const FlowField& flow);

// boundary = 1 - exp(-lambda_b * |grad flow|) > theta_b
BoundaryMap motion_boundary(const FlowField& flow, const MotionParams& params = {});

// Fraction of the 8 axis/diagonal rays from a pixel that meet a boundary
// pixel before leaving the frame; boundary pixels themselves score 1.
InsideOutsideMap inside_outside(const BoundaryMap& boundary);

// Mean inside probability per region.
std::vector<double> motion_term(const InsideOutsideMap& iom, const SuperpixelPartition& p);

Tensor inside_outside_to_tensor(const InsideOutsideMap& iom);

}  // namespace vidcut
