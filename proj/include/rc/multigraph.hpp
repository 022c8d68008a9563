#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rc/graph.hpp"
#include "rc/rng.hpp"

namespace rc {

// Half-edges are numbered v*delta + slot, slot < delta.
using HalfEdgeId = uint32_t;

inline uint32_t he_vertex(HalfEdgeId h, uint32_t delta) { return h / delta; }
inline uint32_t he_slot(HalfEdgeId h, uint32_t delta) { return h % delta; }

using HalfEdgePair = std::pair<HalfEdgeId, HalfEdgeId>;

/// Delta-regular multigraph realized as a perfect matching on the delta*n
/// half-edges. The matching is canonicalized (each pair ordered, pair list
/// sorted), so equal matchings compare equal and serialization round-trips
/// bit-exactly. Edge i of graph() corresponds to pairs()[i].
class MultiGraph {
public:
    MultiGraph() = default; // empty placeholder
    MultiGraph(uint32_t n, uint32_t delta, std::vector<HalfEdgePair> pairs);

    uint32_t n() const { return n_; }
    uint32_t delta() const { return delta_; }
    uint32_t d() const { return delta_ - 1; }
    uint32_t edge_count() const { return static_cast<uint32_t>(pairs_.size()); }
    const std::vector<HalfEdgePair>& pairs() const { return pairs_; }
    const Graph& graph() const { return graph_; }

    bool is_simple() const { return graph_.is_simple(); }

    // Edge id containing a given half-edge.
    uint32_t edge_of_halfedge(HalfEdgeId h) const { return he_to_edge_[h]; }

    void save(std::ostream& os) const;
    void save_file(const std::string& path) const;
    static MultiGraph load(std::istream& is);
    static MultiGraph load_file(const std::string& path);

private:
    uint32_t n_ = 0;
    uint32_t delta_ = 0;
    std::vector<HalfEdgePair> pairs_;
    std::vector<uint32_t> he_to_edge_;
    Graph graph_;
};

/// Incremental revealing of a uniform perfect matching on the half-edges.
/// reveal_next(target) matches `target` to a uniformly random free half-edge;
/// any adaptive choice of targets yields the configuration-model law.
/// Single-owner, mutable.
class RevealCursor {
public:
    RevealCursor(uint32_t n, uint32_t delta, uint64_t seed);

    uint32_t n() const { return n_; }
    uint32_t delta() const { return delta_; }
    uint32_t halfedge_count() const { return n_ * delta_; }

    bool matched(HalfEdgeId h) const { return partner_[h] != kUnmatched; }
    HalfEdgeId partner(HalfEdgeId h) const { return partner_[h]; }
    size_t free_count() const { return free_.size(); }
    bool complete() const { return free_.empty(); }

    // Matches target to a uniform free half-edge (possibly a second free
    // half-edge of the same vertex, giving a self-loop). Returns the pair.
    HalfEdgePair reveal_next(HalfEdgeId target);

    // Conditions the matching on a known pair; consumes no randomness.
    void force_match(HalfEdgeId a, HalfEdgeId b);

    // Lowest-numbered free half-edge (canonical adaptive order).
    HalfEdgeId first_free() const;

    // Matches remaining half-edges in canonical order.
    void complete_canonically();

    const std::vector<HalfEdgePair>& revealed() const { return revealed_; }

    // Builds the MultiGraph once complete.
    MultiGraph finish() const;

private:
    void remove_free(HalfEdgeId h);
    uint32_t n_;
    uint32_t delta_;
    std::vector<HalfEdgeId> partner_;
    std::vector<HalfEdgeId> free_;     // unmatched half-edges
    std::vector<uint32_t> pos_;        // position in free_, or npos
    std::vector<HalfEdgePair> revealed_;
    RandomSource rng_;
    static constexpr HalfEdgeId kUnmatched = UINT32_MAX;
};

// Uniform configuration-model sample; the canonical reveal loop.
MultiGraph sample_cm(uint32_t n, uint32_t delta, uint64_t seed);

// First simple outcome of repeated sample_cm with sub-seeds mix_seed(seed, k).
// Throws retry_exhausted after max_tries attempts.
MultiGraph sample_simple(uint32_t n, uint32_t delta, uint64_t seed, int max_tries = 1000);

struct Ball {
    uint32_t center = 0;
    uint32_t radius = 0;
    std::vector<uint32_t> vertices;  // sorted
    std::vector<uint32_t> edge_ids;  // edges with both endpoints in the ball
    std::vector<uint32_t> boundary;  // sorted: at distance exactly R or adjacent to outside
};

Ball ball(const Graph& g, uint32_t v, uint32_t radius);

// Ball of radius r in the graph with the edges of `excluded` that are
// incident to v removed.
Ball ball_out(const Graph& g, uint32_t v, uint32_t r, const std::vector<uint32_t>& excluded);

// Minimum number of edges whose removal leaves a forest:
// |E(B)| - |vertices| + (#components).
uint32_t tree_excess(const Graph& g, const Ball& b);

// True iff tree_excess(ball(g,v,R)) <= L for every vertex v.
bool is_lr_treelike(const Graph& g, uint32_t L, uint32_t R);
bool is_lr_treelike_serial(const Graph& g, uint32_t L, uint32_t R);

} // namespace rc
