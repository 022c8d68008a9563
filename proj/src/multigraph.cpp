#include "rc/multigraph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rc/errors.hpp"

namespace rc {

MultiGraph::MultiGraph(uint32_t n, uint32_t delta, std::vector<HalfEdgePair> pairs)
    : n_(n), delta_(delta), pairs_(std::move(pairs)) {
    const uint32_t H = n_ * delta_;
    if (pairs_.size() * 2 != H)
        throw config_error("MultiGraph: matching does not cover all half-edges");
    for (auto& pr : pairs_)
        if (pr.first > pr.second) std::swap(pr.first, pr.second);
    std::sort(pairs_.begin(), pairs_.end());
    he_to_edge_.assign(H, UINT32_MAX);
    std::vector<Edge> edges;
    edges.reserve(pairs_.size());
    for (uint32_t i = 0; i < pairs_.size(); ++i) {
        const auto [a, b] = pairs_[i];
        if (a >= H || b >= H || a == b) throw config_error("MultiGraph: bad half-edge pair");
        if (he_to_edge_[a] != UINT32_MAX || he_to_edge_[b] != UINT32_MAX)
            throw config_error("MultiGraph: half-edge matched twice");
        he_to_edge_[a] = i;
        he_to_edge_[b] = i;
        edges.push_back({he_vertex(a, delta_), he_vertex(b, delta_)});
    }
    graph_ = Graph(n_, std::move(edges));
}

void MultiGraph::save(std::ostream& os) const {
    os << "rrg " << n_ << ' ' << delta_ << '\n';
    for (const auto& [a, b] : pairs_)
        os << he_vertex(a, delta_) << ' ' << he_slot(a, delta_) << ' '
           << he_vertex(b, delta_) << ' ' << he_slot(b, delta_) << '\n';
}

void MultiGraph::save_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw usage_error("cannot open for writing: " + path);
    save(os);
}

MultiGraph MultiGraph::load(std::istream& is) {
    std::string magic;
    uint32_t n = 0, delta = 0;
    if (!(is >> magic >> n >> delta) || magic != "rrg")
        throw config_error("graph file: bad header");
    std::vector<HalfEdgePair> pairs;
    uint32_t u, su, v, sv;
    while (is >> u >> su >> v >> sv)
        pairs.push_back({u * delta + su, v * delta + sv});
    return MultiGraph(n, delta, std::move(pairs));
}

MultiGraph MultiGraph::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw usage_error("cannot open: " + path);
    return load(is);
}

// --- RevealCursor -----------------------------------------------------------

RevealCursor::RevealCursor(uint32_t n, uint32_t delta, uint64_t seed)
    : n_(n), delta_(delta), rng_(seed) {
    if (n == 0 || delta == 0) throw config_error("RevealCursor: need n >= 1, delta >= 1");
    const uint64_t H = static_cast<uint64_t>(n) * delta;
    if (H % 2 != 0) throw config_error("RevealCursor: delta*n must be even");
    partner_.assign(H, kUnmatched);
    free_.resize(H);
    pos_.resize(H);
    for (uint32_t h = 0; h < H; ++h) {
        free_[h] = h;
        pos_[h] = h;
    }
}

void RevealCursor::remove_free(HalfEdgeId h) {
    const uint32_t p = pos_[h];
    const HalfEdgeId last = free_.back();
    free_[p] = last;
    pos_[last] = p;
    free_.pop_back();
    pos_[h] = UINT32_MAX;
}

HalfEdgePair RevealCursor::reveal_next(HalfEdgeId target) {
    if (target >= partner_.size() || matched(target))
        throw usage_error("reveal_next: target already matched");
    if (free_.size() < 2) throw usage_error("reveal_next: no free partner available");
    remove_free(target);
    const uint64_t pick = rng_.below(free_.size());
    const HalfEdgeId mate = free_[pick];
    remove_free(mate);
    partner_[target] = mate;
    partner_[mate] = target;
    HalfEdgePair pr{std::min(target, mate), std::max(target, mate)};
    revealed_.push_back(pr);
    return pr;
}

void RevealCursor::force_match(HalfEdgeId a, HalfEdgeId b) {
    if (a == b || matched(a) || matched(b)) throw usage_error("force_match: half-edge unavailable");
    remove_free(a);
    remove_free(b);
    partner_[a] = b;
    partner_[b] = a;
    revealed_.push_back({std::min(a, b), std::max(a, b)});
}

HalfEdgeId RevealCursor::first_free() const {
    HalfEdgeId best = kUnmatched;
    for (HalfEdgeId h : free_) best = std::min(best, h);
    return best;
}

void RevealCursor::complete_canonically() {
    while (!free_.empty()) reveal_next(first_free());
}

MultiGraph RevealCursor::finish() const {
    if (!complete()) throw usage_error("finish: matching incomplete");
    return MultiGraph(n_, delta_, revealed_);
}

// --- samplers ---------------------------------------------------------------

MultiGraph sample_cm(uint32_t n, uint32_t delta, uint64_t seed) {
    RevealCursor cur(n, delta, seed);
    cur.complete_canonically();
    return cur.finish();
}

MultiGraph sample_simple(uint32_t n, uint32_t delta, uint64_t seed, int max_tries) {
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        MultiGraph g = sample_cm(n, delta, mix_seed(seed, static_cast<uint64_t>(attempt)));
        if (g.is_simple()) return g;
    }
    throw retry_exhausted("sample_simple: no simple graph in " + std::to_string(max_tries) +
                              " attempts",
                          max_tries);
}

// --- balls ------------------------------------------------------------------

namespace {

Ball ball_impl(const Graph& g, uint32_t v, uint32_t radius, const std::vector<uint32_t>* excluded) {
    Ball b;
    b.center = v;
    b.radius = radius;

    std::vector<char> forbidden(excluded ? g.edge_count() : 0, 0);
    if (excluded) {
        // Only edges of the excluded set incident to the center are removed.
        for (uint32_t e : *excluded)
            if (g.edge(e).u == v || g.edge(e).v == v) forbidden[e] = 1;
    }

    std::vector<int64_t> dist(g.n(), -1);
    std::vector<uint32_t> order;
    dist[v] = 0;
    order.push_back(v);
    for (size_t qi = 0; qi < order.size(); ++qi) {
        const uint32_t w = order[qi];
        if (dist[w] == radius) continue;
        for (uint32_t e : g.incident(w)) {
            if (excluded && forbidden[e]) continue;
            const uint32_t x = g.other_endpoint(e, w);
            if (dist[x] < 0) {
                dist[x] = dist[w] + 1;
                order.push_back(x);
            }
        }
    }
    b.vertices = order;
    std::sort(b.vertices.begin(), b.vertices.end());

    std::vector<char> in_ball(g.n(), 0);
    for (uint32_t w : b.vertices) in_ball[w] = 1;
    std::vector<char> has_outside(g.n(), 0);
    for (uint32_t e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(e);
        if (in_ball[ed.u] && in_ball[ed.v]) {
            if (!excluded || !forbidden[e]) b.edge_ids.push_back(e);
        } else if (in_ball[ed.u]) {
            has_outside[ed.u] = 1;
        } else if (in_ball[ed.v]) {
            has_outside[ed.v] = 1;
        }
    }
    for (uint32_t w : b.vertices)
        if (dist[w] == radius || has_outside[w]) b.boundary.push_back(w);
    return b;
}

} // namespace

Ball ball(const Graph& g, uint32_t v, uint32_t radius) {
    if (v >= g.n()) throw usage_error("ball: vertex out of range");
    return ball_impl(g, v, radius, nullptr);
}

Ball ball_out(const Graph& g, uint32_t v, uint32_t r, const std::vector<uint32_t>& excluded) {
    if (v >= g.n()) throw usage_error("ball_out: vertex out of range");
    return ball_impl(g, v, r, &excluded);
}

uint32_t tree_excess(const Graph& g, const Ball& b) {
    // |E| - |V| + #components, summed formula valid per component.
    std::vector<uint32_t> parent(b.vertices.size());
    for (uint32_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto local = [&](uint32_t v) {
        return static_cast<uint32_t>(
            std::lower_bound(b.vertices.begin(), b.vertices.end(), v) - b.vertices.begin());
    };
    uint32_t comps = static_cast<uint32_t>(b.vertices.size());
    for (uint32_t e : b.edge_ids) {
        const uint32_t ru = find(local(g.edge(e).u));
        const uint32_t rv = find(local(g.edge(e).v));
        if (ru != rv) {
            parent[ru] = rv;
            --comps;
        }
    }
    return static_cast<uint32_t>(b.edge_ids.size()) - static_cast<uint32_t>(b.vertices.size()) +
           comps;
}

bool is_lr_treelike_serial(const Graph& g, uint32_t L, uint32_t R) {
    for (uint32_t v = 0; v < g.n(); ++v)
        if (tree_excess(g, ball(g, v, R)) > L) return false;
    return true;
}

bool is_lr_treelike(const Graph& g, uint32_t L, uint32_t R) {
    bool ok = true;
#pragma omp parallel for schedule(dynamic, 64)
    for (int64_t v = 0; v < static_cast<int64_t>(g.n()); ++v) {
        if (!ok) continue;
        if (tree_excess(g, ball(g, static_cast<uint32_t>(v), R)) > L) ok = false;
    }
    return ok;
}

} // namespace rc
