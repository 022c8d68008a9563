#include "rc/graph.hpp"

#include <set>
#include <utility>

#include "rc/errors.hpp"

namespace rc {

Graph::Graph(uint32_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    for (const Edge& e : edges_) {
        if (e.u >= n_ || e.v >= n_) throw usage_error("Graph: edge endpoint out of range");
    }
    adj_off_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) {
        ++adj_off_[e.u + 1];
        ++adj_off_[e.v + 1]; // self-loop counted twice at its vertex
    }
    for (uint32_t v = 0; v < n_; ++v) adj_off_[v + 1] += adj_off_[v];
    adj_edge_.resize(adj_off_[n_]);
    std::vector<uint32_t> cursor(adj_off_.begin(), adj_off_.end() - 1);
    for (uint32_t e = 0; e < edges_.size(); ++e) {
        adj_edge_[cursor[edges_[e].u]++] = e;
        adj_edge_[cursor[edges_[e].v]++] = e;
    }
}

bool Graph::is_simple() const {
    std::set<std::pair<uint32_t, uint32_t>> seen;
    for (const Edge& e : edges_) {
        if (e.u == e.v) return false;
        auto key = std::minmax(e.u, e.v);
        if (!seen.insert({key.first, key.second}).second) return false;
    }
    return true;
}

Graph make_triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

Graph make_path(uint32_t vertices) {
    std::vector<Edge> es;
    for (uint32_t i = 0; i + 1 < vertices; ++i) es.push_back({i, i + 1});
    return Graph(vertices, std::move(es));
}

Graph make_cycle(uint32_t vertices) {
    std::vector<Edge> es;
    for (uint32_t i = 0; i < vertices; ++i) es.push_back({i, (i + 1) % vertices});
    return Graph(vertices, std::move(es));
}

Graph make_k4_minus_edge() {
    return Graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}}); // missing {2,3}
}

Graph make_single_edge() { return Graph(2, {{0, 1}}); }

Graph make_doubled_edge_with_loop() {
    return Graph(3, {{0, 1}, {0, 1}, {1, 2}, {2, 2}});
}

Graph named_graph(const std::string& name) {
    if (name == "triangle") return make_triangle();
    if (name == "path4") return make_path(4);
    if (name == "k4me") return make_k4_minus_edge();
    if (name == "edge") return make_single_edge();
    if (name == "multi") return make_doubled_edge_with_loop();
    throw parameter_error("unknown graph name: " + name +
                          " (expected triangle|path4|k4me|edge|multi)");
}

} // namespace rc
