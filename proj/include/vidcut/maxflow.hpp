#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

namespace vidcut {

// Boykov-Kolmogorov augmenting-path max-flow with two search trees, as used
// for exact minimization of binary submodular energies.
//
// Usage: add terminal and pairwise capacities, call solve(), then read the
// cut side with in_source_set(). Results are deterministic: trees are grown
// in node-index order and orphans are adopted in FIFO order.
class MaxflowGraph {
public:
    explicit MaxflowGraph(std::size_t nodes, std::size_t edge_hint = 0);

    std::size_t node_count() const { return nodes_.size(); }

    // Adds capacity on source->i and i->sink. Both must be >= 0.
    void add_terminal(std::size_t i, double source_cap, double sink_cap);
    // Adds the arc pair i->j (cap) and j->i (reverse_cap). Both must be >= 0.
    void add_edge(std::size_t i, std::size_t j, double cap, double reverse_cap);

    // Runs to completion and returns the flow value, including the
    // capacity cancelled between the two terminal arcs of each node.
    double solve();

    // After solve(): true if i is reachable from the source in the residual
    // graph. Unreached nodes belong to the sink side.
    bool in_source_set(std::size_t i) const;

    // After solve(): true if i reaches the sink in the residual graph. Nodes
    // in neither tree are free and can go on either side of a minimum cut.
    bool in_sink_set(std::size_t i) const;

private:
    static constexpr std::int32_t kNone = -1;
    static constexpr std::int32_t kTerminal = -2;
    static constexpr std::int32_t kOrphan = -3;

    struct Node {
        std::int32_t first = kNone;   // head of this node's outgoing arc list
        std::int32_t parent = kNone;  // arc to parent, or kNone/kTerminal/kOrphan
        std::int64_t timestamp = 0;
        std::int32_t dist = 0;
        bool sink = false;
        bool queued = false;
        double terminal_cap = 0.0;    // >0: residual source->i, <0: residual i->sink
    };

    struct Arc {
        std::int32_t head = 0;
        std::int32_t next = kNone;
        double residual = 0.0;
    };

    static std::int32_t sister(std::int32_t a) { return a ^ 1; }

    void activate(std::int32_t i);
    std::int32_t next_active();
    void augment(std::int32_t middle);
    void adopt_source_orphan(std::int32_t i);
    void adopt_sink_orphan(std::int32_t i);
    std::int32_t origin_distance(std::int32_t j);

    std::vector<Node> nodes_;
    std::vector<Arc> arcs_;
    std::deque<std::int32_t> active_;
    std::deque<std::int32_t> orphans_;
    std::int64_t time_ = 0;
    double flow_ = 0.0;
    bool solved_ = false;
};

}  // namespace vidcut
