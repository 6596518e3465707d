#pragma once

#include "vidcut/flow.hpp"
#include "vidcut/raster_io.hpp"
#include "vidcut/superpixel.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

namespace vidcut {

struct GraphNode {
    std::uint32_t frame = 0;
    std::uint32_t region = 0;
};

struct SpatialEdge {
    std::uint32_t u = 0, v = 0;  // node ids, same frame
    std::uint32_t boundary_length = 0;
    double color_distance_sq = 0.0;
};

struct TemporalEdge {
    std::uint32_t u = 0, v = 0;  // node in frame t, node in frame t+1
    std::uint32_t link_count = 0;
    std::uint32_t source_size = 0;
    double color_distance_sq = 0.0;
};

// Superpixels of all frames of one clip with spatial and flow-linked edges.
struct SpatioTemporalGraph {
    std::vector<GraphNode> nodes;
    std::vector<std::uint32_t> frame_offset;  // first node id of each frame
    std::vector<SpatialEdge> spatial;
    std::vector<TemporalEdge> temporal;

    std::uint32_t node_id(std::uint32_t frame, std::uint32_t region) const { return frame_offset[frame] + region; }
    std::size_t frame_count() const { return frame_offset.size(); }
};

// correspondences[t] links frame t to t+1.
SpatioTemporalGraph build_graph(std::span<const SuperpixelPartition> partitions,
                                std::span<const FlowCorrespondence> correspondences);

struct EnergyParams {
    double lambda_a = 2.0;
    double lambda_m = 1.0;
    double lambda_c = 2.0;
    double epsilon = 1e-6;
    double gamma = 1.0;  // global pairwise gain
};

struct PairwiseTerm {
    std::uint32_t u = 0, v = 0;
    double weight = 0.0;  // paid when labels differ
};

// Binary energy: sum of unary[i][l_i] plus weight of every cut pair.
struct EnergyModel {
    std::vector<std::array<double, 2>> unary;  // {u0 (background), u1 (foreground)}
    std::vector<PairwiseTerm> pairwise;

    nlohmann::json to_json() const;
    static EnergyModel from_json(const nlohmann::json& j);
};

// Unary terms for one node from attention, motion and appearance evidence.
std::array<double, 2> unary_costs(double attention, double motion, double appearance, const EnergyParams& params);

EnergyModel assemble_energy(const SpatioTemporalGraph& graph, std::span<const double> attention,
                            std::span<const double> motion, std::span<const double> appearance,
                            const EnergyParams& params = {});

struct Labeling {
    std::vector<std::uint8_t> labels;  // per node, 1 = foreground
    double energy = 0.0;               // as reported by the max-flow solve
};

double compute_energy(const EnergyModel& model, std::span<const std::uint8_t> labels);

// Exact minimizer via max-flow. Among optimal labelings, nodes that are free
// to take either label get background. Negative or non-finite weights are rejected.
Labeling min_cut(const EnergyModel& model);

std::vector<SegmentationMask> labeling_to_masks(const Labeling& labeling, const SpatioTemporalGraph& graph,
                                                std::span<const SuperpixelPartition> partitions);

}  // namespace vidcut
