#include "wastebench/maxflow.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "wastebench/errors.hpp"

namespace wastebench {

namespace {
constexpr int kTerminal = -1;
constexpr int kOrphan = -2;
constexpr int kNil = -3;  // end of the active list
}  // namespace

MaxFlowGraph::MaxFlowGraph(int node_count, int edge_hint) {
    nodes_.reserve(node_count);
    // Arc indices 0 and 1 are reserved so that 0 can mean "no arc".
    arcs_.reserve(2 + 2 * static_cast<std::size_t>(edge_hint));
    arcs_.resize(2);
    for (int i = 0; i < node_count; ++i) add_node();
}

int MaxFlowGraph::add_node() {
    nodes_.emplace_back();
    return static_cast<int>(nodes_.size()) - 1;
}

void MaxFlowGraph::add_terminal_weights(int i, double source_cap, double sink_cap) {
    if (source_cap < 0 || sink_cap < 0) throw ValidationError("negative terminal capacity");
    double current = nodes_[i].residual;
    if (current > 0) {
        source_cap += current;
    } else {
        sink_cap -= current;
    }
    flow_ += std::min(source_cap, sink_cap);
    nodes_[i].residual = source_cap - sink_cap;
}

void MaxFlowGraph::add_edge(int i, int j, double cap, double rev_cap) {
    if (i == j) return;
    if (cap < 0 || rev_cap < 0) throw ValidationError("negative edge capacity");
    const int a = static_cast<int>(arcs_.size());
    arcs_.push_back({j, nodes_[i].first, cap});
    nodes_[i].first = a;
    arcs_.push_back({i, nodes_[j].first, rev_cap});
    nodes_[j].first = a + 1;
}

double MaxFlowGraph::max_flow() {
    // Active queue as an intrusive singly linked list through Node::next.
    int first = kNil;
    int last = kNil;
    auto push_active = [&](int v) {
        nodes_[v].next = kNil;
        if (last == kNil) {
            first = v;
        } else {
            nodes_[last].next = v;
        }
        last = v;
    };

    for (int i = 0; i < node_count(); ++i) {
        Node& v = nodes_[i];
        v.ts = 0;
        v.next = -1;
        if (v.residual != 0) {
            push_active(i);
            v.dist = 1;
            v.parent = kTerminal;
            v.tree = v.residual < 0 ? 1 : 0;
        } else {
            v.parent = 0;
        }
    }

    std::vector<int> orphans;
    int curr_ts = 0;

    for (;;) {
        int bridge = -1;

        // Grow both search trees until they touch.
        while (first != kNil) {
            const int vi = first;
            Node& v = nodes_[vi];
            if (v.parent) {
                const std::uint8_t vt = v.tree;
                for (int a = v.first; a != 0; a = arcs_[a].next) {
                    if (arcs_[a ^ vt].cap == 0) continue;
                    const int ui = arcs_[a].head;
                    Node& u = nodes_[ui];
                    if (!u.parent) {
                        u.tree = vt;
                        u.parent = a ^ 1;
                        u.ts = v.ts;
                        u.dist = v.dist + 1;
                        if (u.next == -1) push_active(ui);
                        continue;
                    }
                    if (u.tree != vt) {
                        bridge = a ^ vt;
                        break;
                    }
                    if (u.dist > v.dist + 1 && u.ts <= v.ts) {
                        u.parent = a ^ 1;
                        u.ts = v.ts;
                        u.dist = v.dist + 1;
                    }
                }
                if (bridge > 0) break;
            }
            first = v.next;
            if (first == kNil) last = kNil;
            v.next = -1;
        }
        if (bridge <= 0) break;

        // Bottleneck along source-tree path, bridge arc, sink-tree path.
        double bottleneck = arcs_[bridge].cap;
        for (int k = 1; k >= 0; --k) {
            int vi = arcs_[bridge ^ k].head;
            for (;;) {
                const int a = nodes_[vi].parent;
                if (a < 0) break;
                bottleneck = std::min(bottleneck, arcs_[a ^ k].cap);
                vi = arcs_[a].head;
            }
            bottleneck = std::min(bottleneck, std::abs(nodes_[vi].residual));
        }

        arcs_[bridge].cap -= bottleneck;
        arcs_[bridge ^ 1].cap += bottleneck;
        flow_ += bottleneck;

        for (int k = 1; k >= 0; --k) {
            int vi = arcs_[bridge ^ k].head;
            for (;;) {
                const int a = nodes_[vi].parent;
                if (a < 0) break;
                arcs_[a ^ (k ^ 1)].cap += bottleneck;
                arcs_[a ^ k].cap -= bottleneck;
                if (arcs_[a ^ k].cap == 0) {
                    orphans.push_back(vi);
                    nodes_[vi].parent = kOrphan;
                }
                vi = arcs_[a].head;
            }
            nodes_[vi].residual += bottleneck * (1 - k * 2);
            if (nodes_[vi].residual == 0) {
                orphans.push_back(vi);
                nodes_[vi].parent = kOrphan;
            }
        }

        // Adopt orphans or release them to the free set.
        ++curr_ts;
        while (!orphans.empty()) {
            const int oi = orphans.back();
            orphans.pop_back();
            const std::uint8_t vt = nodes_[oi].tree;
            int best_arc = 0;
            int min_dist = INT_MAX;

            for (int a = nodes_[oi].first; a != 0; a = arcs_[a].next) {
                if (arcs_[a ^ (vt ^ 1)].cap == 0) continue;
                int ui = arcs_[a].head;
                if (nodes_[ui].tree != vt || nodes_[ui].parent == 0) continue;

                int d = 0;
                for (;;) {
                    Node& u = nodes_[ui];
                    if (u.ts == curr_ts) {
                        d += u.dist;
                        break;
                    }
                    const int up = u.parent;
                    ++d;
                    if (up < 0) {
                        if (up == kOrphan) {
                            d = INT_MAX - 1;
                        } else {
                            u.ts = curr_ts;
                            u.dist = 1;
                        }
                        break;
                    }
                    ui = arcs_[up].head;
                }

                if (++d < INT_MAX) {
                    if (d < min_dist) {
                        min_dist = d;
                        best_arc = a;
                    }
                    for (int wi = arcs_[a].head; nodes_[wi].ts != curr_ts; wi = arcs_[nodes_[wi].parent].head) {
                        nodes_[wi].ts = curr_ts;
                        nodes_[wi].dist = --d;
                    }
                }
            }

            if ((nodes_[oi].parent = best_arc) > 0) {
                nodes_[oi].ts = curr_ts;
                nodes_[oi].dist = min_dist;
                continue;
            }

            nodes_[oi].ts = 0;
            for (int a = nodes_[oi].first; a != 0; a = arcs_[a].next) {
                const int ui = arcs_[a].head;
                Node& u = nodes_[ui];
                const int up = u.parent;
                if (u.tree != vt || !up) continue;
                if (arcs_[a ^ (vt ^ 1)].cap != 0 && u.next == -1) push_active(ui);
                if (up > 0 && arcs_[up].head == oi) {
                    orphans.push_back(ui);
                    u.parent = kOrphan;
                }
            }
        }
    }
    return flow_;
}

bool MaxFlowGraph::in_source_segment(int i) const {
    const Node& v = nodes_[i];
    return v.parent == 0 || v.tree == 0;
}

}  // namespace wastebench
