#pragma once

#include <cstdint>
#include <vector>

namespace wastebench {

/// Boykov-Kolmogorov augmenting-path max-flow on a graph with explicit
/// source/sink terminal capacities. Node i ends on the source side when
/// in_source_segment(i) is true.
class MaxFlowGraph {
public:
    explicit MaxFlowGraph(int node_count = 0, int edge_hint = 0);

    int add_node();
    int node_count() const { return static_cast<int>(nodes_.size()); }

    /// Capacity from the source to i and from i to the sink.
    void add_terminal_weights(int i, double source_cap, double sink_cap);
    /// Directed capacities i->j and j->i.
    void add_edge(int i, int j, double cap, double rev_cap);

    double max_flow();
    bool in_source_segment(int i) const;

private:
    struct Node {
        int first = 0;      // first outgoing arc, 0 = none
        int parent = 0;     // arc to parent, 0 = free, <0 = terminal/orphan
        int next = -1;      // active-list link, -1 = not queued
        int ts = 0;
        int dist = 0;
        double residual = 0.0;  // >0 source capacity, <0 sink capacity
        std::uint8_t tree = 0;  // 0 = source tree, 1 = sink tree
    };
    struct Arc {
        int head = 0;
        int next = 0;
        double cap = 0.0;
    };

    std::vector<Node> nodes_;
    std::vector<Arc> arcs_;
    double flow_ = 0.0;
};

}  // namespace wastebench
