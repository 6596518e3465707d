#include "vidcut/graphcut.hpp"

#include "vidcut/error.hpp"
#include "vidcut/maxflow.hpp"

#include <algorithm>
#include <cmath>

namespace vidcut {

namespace {

double color_distance_sq(const RegionStats& a, const RegionStats& b) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += (a.mean_rgb[k] - b.mean_rgb[k]) * (a.mean_rgb[k] - b.mean_rgb[k]);
    return s;
}

void check_unit(std::span<const double> values, const char* what) {
    for (double v : values)
        if (!(v >= 0.0 && v <= 1.0)) throw InputError(std::string("assemble_energy: ") + what + " outside [0,1]");
}

}  // namespace

SpatioTemporalGraph build_graph(std::span<const SuperpixelPartition> partitions,
                                std::span<const FlowCorrespondence> correspondences) {
    if (partitions.empty()) throw InputError("build_graph: no frames");
    if (correspondences.size() + 1 != partitions.size())
        throw InputError("build_graph: need one correspondence per consecutive frame pair");

    SpatioTemporalGraph g;
    for (std::uint32_t t = 0; t < partitions.size(); ++t) {
        g.frame_offset.push_back(static_cast<std::uint32_t>(g.nodes.size()));
        for (std::uint32_t r = 0; r < partitions[t].count(); ++r) g.nodes.push_back({t, r});
    }
    for (std::uint32_t t = 0; t < partitions.size(); ++t) {
        const auto& p = partitions[t];
        for (const auto& adj : region_adjacency(p))
            g.spatial.push_back({g.node_id(t, adj.a), g.node_id(t, adj.b), adj.boundary_length,
                                 color_distance_sq(p.regions[adj.a], p.regions[adj.b])});
    }
    for (std::uint32_t t = 0; t + 1 < partitions.size(); ++t) {
        const auto& from = partitions[t];
        const auto& to = partitions[t + 1];
        for (const auto& link : correspondences[t].links) {
            if (link.count == 0) continue;
            if (link.from >= from.count() || link.to >= to.count())
                throw InputError("build_graph: correspondence references a missing region");
            g.temporal.push_back({g.node_id(t, link.from), g.node_id(t + 1, link.to), link.count,
                                  from.regions[link.from].pixel_count,
                                  color_distance_sq(from.regions[link.from], to.regions[link.to])});
        }
    }
    return g;
}

std::array<double, 2> unary_costs(double attention, double motion, double appearance, const EnergyParams& params) {
    const double lo = params.epsilon, hi = 1.0 - params.epsilon;
    const double a = std::clamp(attention, lo, hi);
    const double m = std::clamp(motion, lo, hi);
    const double c = std::clamp(appearance, lo, hi);
    const double a0 = std::clamp(1.0 - attention, lo, hi);
    const double m0 = std::clamp(1.0 - motion, lo, hi);
    const double c0 = std::clamp(1.0 - appearance, lo, hi);
    const double u1 = -params.lambda_a * std::log(a) - params.lambda_m * std::log(m) - params.lambda_c * std::log(c);
    const double u0 =
        -params.lambda_a * std::log(a0) - params.lambda_m * std::log(m0) - params.lambda_c * std::log(c0);
    return {u0, u1};
}

EnergyModel assemble_energy(const SpatioTemporalGraph& graph, std::span<const double> attention,
                            std::span<const double> motion, std::span<const double> appearance,
                            const EnergyParams& params) {
    const std::size_t n = graph.nodes.size();
    if (n == 0) throw InputError("assemble_energy: empty graph");
    if (attention.size() != n || motion.size() != n || appearance.size() != n)
        throw InputError("assemble_energy: per-node term count differs from node count");
    check_unit(attention, "attention");
    check_unit(motion, "motion");
    check_unit(appearance, "appearance");
    if (!(params.epsilon > 0.0 && params.epsilon < 0.5)) throw InputError("assemble_energy: epsilon must be in (0, 0.5)");
    if (!(params.gamma >= 0.0)) throw InputError("assemble_energy: gamma must be >= 0");

    EnergyModel model;
    model.unary.resize(n);
    for (std::size_t i = 0; i < n; ++i) model.unary[i] = unary_costs(attention[i], motion[i], appearance[i], params);

    double color_sum = 0.0;
    for (const auto& e : graph.spatial) color_sum += e.color_distance_sq;
    for (const auto& e : graph.temporal) color_sum += e.color_distance_sq;
    const std::size_t edge_count = graph.spatial.size() + graph.temporal.size();
    const double sigma_sq = edge_count ? color_sum / static_cast<double>(edge_count) : 0.0;
    auto color_similarity = [sigma_sq](double d2) {
        return sigma_sq > 0.0 ? std::exp(-d2 / (2.0 * sigma_sq)) : 1.0;
    };

    double boundary_sum = 0.0;
    for (const auto& e : graph.spatial) boundary_sum += e.boundary_length;
    const double mean_boundary = graph.spatial.empty() ? 1.0 : boundary_sum / static_cast<double>(graph.spatial.size());

    model.pairwise.reserve(edge_count);
    for (const auto& e : graph.spatial) {
        const double phi_s = e.boundary_length / mean_boundary;
        model.pairwise.push_back({e.u, e.v, params.gamma * phi_s * color_similarity(e.color_distance_sq)});
    }
    for (const auto& e : graph.temporal) {
        const double phi_t = static_cast<double>(e.link_count) / e.source_size;
        model.pairwise.push_back({e.u, e.v, params.gamma * phi_t * color_similarity(e.color_distance_sq)});
    }
    return model;
}

double compute_energy(const EnergyModel& model, std::span<const std::uint8_t> labels) {
    if (labels.size() != model.unary.size()) throw InputError("compute_energy: labeling size mismatch");
    double e = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) e += model.unary[i][labels[i] ? 1 : 0];
    for (const auto& p : model.pairwise)
        if ((labels[p.u] != 0) != (labels[p.v] != 0)) e += p.weight;
    return e;
}

Labeling min_cut(const EnergyModel& model) {
    const std::size_t n = model.unary.size();
    for (const auto& p : model.pairwise) {
        if (!(p.weight >= 0.0) || !std::isfinite(p.weight))
            throw InputError("min_cut: pairwise weights must be finite and >= 0");
        if (p.u >= n || p.v >= n) throw InputError("min_cut: pairwise term references a missing node");
    }
    MaxflowGraph graph(n, model.pairwise.size());
    double constant = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [u0, u1] = model.unary[i];
        if (!std::isfinite(u0) || !std::isfinite(u1)) throw InputError("min_cut: unary costs must be finite");
        const double base = std::min(u0, u1);
        constant += base;
        // source side = background: cutting source->i costs u1, i->sink costs u0
        graph.add_terminal(i, u1 - base, u0 - base);
    }
    for (const auto& p : model.pairwise)
        if (p.u != p.v) graph.add_edge(p.u, p.v, p.weight, p.weight);

    Labeling out;
    out.energy = constant + graph.solve();
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.labels[i] = graph.in_sink_set(i) ? 1 : 0;  // free nodes stay background
    return out;
}

std::vector<SegmentationMask> labeling_to_masks(const Labeling& labeling, const SpatioTemporalGraph& graph,
                                                std::span<const SuperpixelPartition> partitions) {
    if (labeling.labels.size() != graph.nodes.size()) throw InputError("labeling_to_masks: labeling size mismatch");
    if (partitions.size() != graph.frame_count()) throw InputError("labeling_to_masks: frame count mismatch");
    std::vector<SegmentationMask> masks;
    masks.reserve(partitions.size());
    for (std::uint32_t t = 0; t < partitions.size(); ++t) {
        const auto& p = partitions[t];
        SegmentationMask m(p.width, p.height);
        for (std::size_t i = 0; i < p.labels.size(); ++i) m.values[i] = labeling.labels[graph.node_id(t, p.labels[i])];
        masks.push_back(std::move(m));
    }
    return masks;
}

nlohmann::json EnergyModel::to_json() const {
    nlohmann::json u = nlohmann::json::array();
    for (const auto& c : unary) u.push_back({c[0], c[1]});
    nlohmann::json p = nlohmann::json::array();
    for (const auto& e : pairwise) p.push_back({{"u", e.u}, {"v", e.v}, {"w", e.weight}});
    return {{"unary", u}, {"pairwise", p}};
}

EnergyModel EnergyModel::from_json(const nlohmann::json& j) {
    EnergyModel m;
    try {
        for (const auto& c : j.at("unary")) m.unary.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
        for (const auto& e : j.at("pairwise"))
            m.pairwise.push_back({e.at("u").get<std::uint32_t>(), e.at("v").get<std::uint32_t>(), e.at("w").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("energy json: ") + e.what());
    }
    return m;
}

}  // namespace vidcut
