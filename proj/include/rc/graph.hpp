#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rc {

struct Edge {
    uint32_t u;
    uint32_t v;
    bool operator==(const Edge&) const = default;
};

/// Plain undirected multigraph over vertices {0,...,n-1}. Self-loops and
/// parallel edges are allowed; an edge is identified by its index in the
/// edge list, which is the indexing every configuration in the project uses.
class Graph {
public:
    Graph() = default;
    Graph(uint32_t n, std::vector<Edge> edges);

    uint32_t n() const { return n_; }
    uint32_t edge_count() const { return static_cast<uint32_t>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(uint32_t e) const { return edges_[e]; }

    // Degree counting self-loops twice.
    uint32_t degree(uint32_t v) const { return adj_off_[v + 1] - adj_off_[v]; }

    // Edge ids incident to v; a self-loop at v appears twice.
    std::span<const uint32_t> incident(uint32_t v) const {
        return {adj_edge_.data() + adj_off_[v], adj_edge_.data() + adj_off_[v + 1]};
    }

    uint32_t other_endpoint(uint32_t e, uint32_t v) const {
        const Edge& ed = edges_[e];
        return ed.u == v ? ed.v : ed.u;
    }

    bool is_simple() const;

private:
    uint32_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<uint32_t> adj_off_;  // CSR offsets, size n+1
    std::vector<uint32_t> adj_edge_; // edge ids
};

// Small named instances used by tests and the exact-check CLI.
Graph make_triangle();
Graph make_path(uint32_t vertices);
Graph make_cycle(uint32_t vertices);
Graph make_k4_minus_edge();
Graph make_single_edge();
Graph make_doubled_edge_with_loop(); // n=3: two copies of {0,1}, edge {1,2}, loop at 2
Graph named_graph(const std::string& name);

} // namespace rc
