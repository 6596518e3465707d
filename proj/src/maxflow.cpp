#include "vidcut/maxflow.hpp"

#include "vidcut/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vidcut {

MaxflowGraph::MaxflowGraph(std::size_t nodes, std::size_t edge_hint) : nodes_(nodes) {
    if (nodes > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
        throw InputError("maxflow: too many nodes");
    arcs_.reserve(2 * edge_hint);
}

void MaxflowGraph::add_terminal(std::size_t i, double source_cap, double sink_cap) {
    if (!(source_cap >= 0.0) || !(sink_cap >= 0.0) || !std::isfinite(source_cap) || !std::isfinite(sink_cap))
        throw InputError("maxflow: terminal capacities must be finite and >= 0");
    auto& n = nodes_.at(i);
    if (n.terminal_cap > 0.0)
        source_cap += n.terminal_cap;
    else
        sink_cap -= n.terminal_cap;
    flow_ += std::min(source_cap, sink_cap);
    n.terminal_cap = source_cap - sink_cap;
}

void MaxflowGraph::add_edge(std::size_t i, std::size_t j, double cap, double reverse_cap) {
    if (!(cap >= 0.0) || !(reverse_cap >= 0.0) || !std::isfinite(cap) || !std::isfinite(reverse_cap))
        throw InputError("maxflow: edge capacities must be finite and >= 0");
    if (i == j) throw InputError("maxflow: self loop");
    if (i >= nodes_.size() || j >= nodes_.size()) throw InputError("maxflow: node index out of range");
    if (arcs_.size() + 2 > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
        throw InputError("maxflow: too many arcs");
    const auto a = static_cast<std::int32_t>(arcs_.size());
    arcs_.push_back({static_cast<std::int32_t>(j), nodes_[i].first, cap});
    arcs_.push_back({static_cast<std::int32_t>(i), nodes_[j].first, reverse_cap});
    nodes_[i].first = a;
    nodes_[j].first = a + 1;
}

void MaxflowGraph::activate(std::int32_t i) {
    auto& n = nodes_[i];
    if (n.queued) return;
    n.queued = true;
    active_.push_back(i);
}

std::int32_t MaxflowGraph::next_active() {
    while (!active_.empty()) {
        const auto i = active_.front();
        active_.pop_front();
        nodes_[i].queued = false;
        if (nodes_[i].parent != kNone) return i;
    }
    return kNone;
}

void MaxflowGraph::augment(std::int32_t middle) {
    const std::int32_t u = arcs_[sister(middle)].head;  // source-tree end
    const std::int32_t v = arcs_[middle].head;          // sink-tree end

    double bottleneck = arcs_[middle].residual;
    std::int32_t i = u;
    for (std::int32_t pa = nodes_[i].parent; pa != kTerminal; pa = nodes_[i].parent) {
        bottleneck = std::min(bottleneck, arcs_[sister(pa)].residual);
        i = arcs_[pa].head;
    }
    bottleneck = std::min(bottleneck, nodes_[i].terminal_cap);
    i = v;
    for (std::int32_t pa = nodes_[i].parent; pa != kTerminal; pa = nodes_[i].parent) {
        bottleneck = std::min(bottleneck, arcs_[pa].residual);
        i = arcs_[pa].head;
    }
    bottleneck = std::min(bottleneck, -nodes_[i].terminal_cap);

    arcs_[sister(middle)].residual += bottleneck;
    arcs_[middle].residual -= bottleneck;

    auto orphan = [this](std::int32_t k) {
        nodes_[k].parent = kOrphan;
        orphans_.push_back(k);
    };

    i = u;
    while (true) {
        const std::int32_t pa = nodes_[i].parent;
        if (pa == kTerminal) break;
        arcs_[pa].residual += bottleneck;
        arcs_[sister(pa)].residual -= bottleneck;
        const std::int32_t up = arcs_[pa].head;
        if (arcs_[sister(pa)].residual == 0.0) orphan(i);
        i = up;
    }
    nodes_[i].terminal_cap -= bottleneck;
    if (nodes_[i].terminal_cap == 0.0) orphan(i);

    i = v;
    while (true) {
        const std::int32_t pa = nodes_[i].parent;
        if (pa == kTerminal) break;
        arcs_[sister(pa)].residual += bottleneck;
        arcs_[pa].residual -= bottleneck;
        const std::int32_t up = arcs_[pa].head;
        if (arcs_[pa].residual == 0.0) orphan(i);
        i = up;
    }
    nodes_[i].terminal_cap += bottleneck;
    if (nodes_[i].terminal_cap == 0.0) orphan(i);

    flow_ += bottleneck;
}

// Distance from j to its terminal through valid parents, or max() if the
// chain ends in an orphan. Marks visited nodes with the current timestamp.
std::int32_t MaxflowGraph::origin_distance(std::int32_t j) {
    constexpr std::int32_t kInfinite = std::numeric_limits<std::int32_t>::max();
    std::int32_t d = 0;
    std::int32_t k = j;
    while (true) {
        auto& n = nodes_[k];
        if (n.timestamp == time_) {
            d += n.dist;
            break;
        }
        const std::int32_t a = n.parent;
        ++d;
        if (a == kTerminal) {
            n.timestamp = time_;
            n.dist = 1;
            break;
        }
        if (a == kOrphan || a == kNone) return kInfinite;
        k = arcs_[a].head;
    }
    // cache distances along the verified path
    std::int32_t dd = d;
    for (k = j; nodes_[k].timestamp != time_; k = arcs_[nodes_[k].parent].head) {
        nodes_[k].timestamp = time_;
        nodes_[k].dist = dd--;
    }
    return d;
}

void MaxflowGraph::adopt_source_orphan(std::int32_t i) {
    constexpr std::int32_t kInfinite = std::numeric_limits<std::int32_t>::max();
    std::int32_t best_arc = kNone;
    std::int32_t best_dist = kInfinite;
    for (std::int32_t a0 = nodes_[i].first; a0 != kNone; a0 = arcs_[a0].next) {
        if (arcs_[sister(a0)].residual <= 0.0) continue;
        const std::int32_t j = arcs_[a0].head;
        if (nodes_[j].sink || nodes_[j].parent == kNone) continue;
        const std::int32_t d = origin_distance(j);
        if (d < best_dist) {
            best_dist = d;
            best_arc = a0;
        }
    }
    auto& n = nodes_[i];
    if (best_arc != kNone) {
        n.parent = best_arc;
        n.timestamp = time_;
        n.dist = best_dist + 1;
        return;
    }
    n.parent = kNone;
    n.timestamp = 0;
    for (std::int32_t a0 = n.first; a0 != kNone; a0 = arcs_[a0].next) {
        const std::int32_t j = arcs_[a0].head;
        auto& nj = nodes_[j];
        const std::int32_t a = nj.parent;
        if (nj.sink || a == kNone) continue;
        if (arcs_[sister(a0)].residual > 0.0) activate(j);
        if (a != kTerminal && a != kOrphan && arcs_[a].head == i) {
            nj.parent = kOrphan;
            orphans_.push_back(j);
        }
    }
}

void MaxflowGraph::adopt_sink_orphan(std::int32_t i) {
    constexpr std::int32_t kInfinite = std::numeric_limits<std::int32_t>::max();
    std::int32_t best_arc = kNone;
    std::int32_t best_dist = kInfinite;
    for (std::int32_t a0 = nodes_[i].first; a0 != kNone; a0 = arcs_[a0].next) {
        if (arcs_[a0].residual <= 0.0) continue;
        const std::int32_t j = arcs_[a0].head;
        if (!nodes_[j].sink || nodes_[j].parent == kNone) continue;
        const std::int32_t d = origin_distance(j);
        if (d < best_dist) {
            best_dist = d;
            best_arc = a0;
        }
    }
    auto& n = nodes_[i];
    if (best_arc != kNone) {
        n.parent = best_arc;
        n.timestamp = time_;
        n.dist = best_dist + 1;
        return;
    }
    n.parent = kNone;
    n.timestamp = 0;
    for (std::int32_t a0 = n.first; a0 != kNone; a0 = arcs_[a0].next) {
        const std::int32_t j = arcs_[a0].head;
        auto& nj = nodes_[j];
        const std::int32_t a = nj.parent;
        if (!nj.sink || a == kNone) continue;
        if (arcs_[a0].residual > 0.0) activate(j);
        if (a != kTerminal && a != kOrphan && arcs_[a].head == i) {
            nj.parent = kOrphan;
            orphans_.push_back(j);
        }
    }
}

double MaxflowGraph::solve() {
    if (solved_) return flow_;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        auto& n = nodes_[k];
        if (n.terminal_cap != 0.0) {
            n.parent = kTerminal;
            n.sink = n.terminal_cap < 0.0;
            n.timestamp = 0;
            n.dist = 1;
            activate(static_cast<std::int32_t>(k));
        } else {
            n.parent = kNone;
        }
    }

    std::int32_t current = kNone;
    while (true) {
        std::int32_t i = current;
        if (i == kNone || nodes_[i].parent == kNone) {
            i = next_active();
            if (i == kNone) break;
        }
        current = kNone;

        std::int32_t path = kNone;
        if (!nodes_[i].sink) {
            for (std::int32_t a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
                if (arcs_[a].residual <= 0.0) continue;
                const std::int32_t j = arcs_[a].head;
                auto& nj = nodes_[j];
                const auto& ni = nodes_[i];
                if (nj.parent == kNone) {
                    nj.sink = false;
                    nj.parent = sister(a);
                    nj.timestamp = ni.timestamp;
                    nj.dist = ni.dist + 1;
                    activate(j);
                } else if (nj.sink) {
                    path = a;
                    break;
                } else if (nj.timestamp <= ni.timestamp && nj.dist > ni.dist) {
                    // shorter route to the source through i
                    nj.parent = sister(a);
                    nj.timestamp = ni.timestamp;
                    nj.dist = ni.dist + 1;
                }
            }
        } else {
            for (std::int32_t a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
                if (arcs_[sister(a)].residual <= 0.0) continue;
                const std::int32_t j = arcs_[a].head;
                auto& nj = nodes_[j];
                const auto& ni = nodes_[i];
                if (nj.parent == kNone) {
                    nj.sink = true;
                    nj.parent = sister(a);
                    nj.timestamp = ni.timestamp;
                    nj.dist = ni.dist + 1;
                    activate(j);
                } else if (!nj.sink) {
                    path = sister(a);
                    break;
                } else if (nj.timestamp <= ni.timestamp && nj.dist > ni.dist) {
                    nj.parent = sister(a);
                    nj.timestamp = ni.timestamp;
                    nj.dist = ni.dist + 1;
                }
            }
        }

        ++time_;
        if (path == kNone) continue;

        current = i;  // i may still have unexplored residual arcs
        augment(path);
        while (!orphans_.empty()) {
            const auto o = orphans_.front();
            orphans_.pop_front();
            if (nodes_[o].sink)
                adopt_sink_orphan(o);
            else
                adopt_source_orphan(o);
        }
    }
    solved_ = true;
    return flow_;
}

bool MaxflowGraph::in_source_set(std::size_t i) const {
    const auto& n = nodes_.at(i);
    return n.parent != kNone && !n.sink;
}

bool MaxflowGraph::in_sink_set(std::size_t i) const {
    const auto& n = nodes_.at(i);
    return n.parent != kNone && n.sink;
}

}  // namespace vidcut
