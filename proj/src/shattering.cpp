#include "rc/shattering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rc/connectivity.hpp"
#include "rc/dynamics.hpp"
#include "rc/errors.hpp"
#include "rc/exact.hpp"
#include "rc/tree.hpp"

namespace rc {

uint64_t tree_edge_count(uint32_t delta, uint32_t r) {
    uint64_t total = 0, level = delta;
    for (uint32_t i = 1; i <= r; ++i) {
        total += level;
        level *= delta - 1;
    }
    return total;
}

uint64_t tree_vertex_count(uint32_t delta, uint32_t r) { return 1 + tree_edge_count(delta, r); }

uint64_t t_burn(double c0, uint32_t r, uint32_t n, uint32_t delta, double tmix_tree) {
    if (c0 <= 0.0) throw parameter_error("t_burn: c0 must be positive");
    const double edges = static_cast<double>(tree_edge_count(delta, r));
    if (tmix_tree <= 0.0) tmix_tree = edges * std::log(edges);
    const double val = c0 * n * std::log(static_cast<double>(n)) * tmix_tree / edges;
    return static_cast<uint64_t>(std::ceil(val));
}

// --- joint revealing ---------------------------------------------------------

namespace {

struct FlaggedUf {
    std::vector<uint32_t> parent;
    std::vector<uint8_t> has_v0;
    explicit FlaggedUf(uint32_t n) : parent(n), has_v0(n, 0) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    uint32_t find(uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(uint32_t a, uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        parent[a] = b;
        has_v0[b] |= has_v0[a];
    }
};

} // namespace

JointRevealResult joint_reveal(uint32_t n, uint32_t delta, double p, double q,
                               const std::vector<HalfEdgePair>& a0_pairs,
                               const std::vector<uint32_t>& v0, uint32_t r, uint64_t t,
                               uint64_t seed) {
    if (r < 1) throw parameter_error("joint_reveal: r must be at least 1");
    JointRevealResult out;
    out.n = n;
    out.delta = delta;
    out.r = r;
    out.p = p;
    out.q = q;
    out.t = t;
    out.seed = seed;
    out.a0_pairs = a0_pairs;
    out.v0 = v0;

    RevealCursor cursor(n, delta, mix_seed(seed, 0));
    for (const auto& [a, b] : a0_pairs) cursor.force_match(a, b);
    const size_t a0_count = a0_pairs.size();

    // Shared update stream, represented over half-edges: a uniform half-edge
    // h identifies the (eventual) edge containing it, so each edge is hit
    // with probability 2/(delta n) per step regardless of the matching.
    const uint32_t H = n * delta;
    std::vector<std::vector<std::pair<uint64_t, double>>> hits(H);
    {
        RandomSource stream(mix_seed(seed, 1));
        for (uint64_t s = 1; s <= t; ++s) {
            const uint32_t h = static_cast<uint32_t>(stream.below(H));
            const double u = stream.u01();
            hits[h].push_back({s, u});
        }
    }

    // global connectivity of omega_tilde, flagged by membership of V0 clusters
    FlaggedUf uf(n);
    for (uint32_t v : v0) {
        if (v >= n) throw usage_error("joint_reveal: V0 vertex out of range");
        uf.has_v0[uf.find(v)] = 1;
    }

    std::vector<uint8_t> in_past_generation(n, 0);
    for (uint32_t v : v0) in_past_generation[v] = 1;

    // vertices of the newly revealed region, candidates for later frontiers
    std::vector<uint32_t> region_vertices;
    std::vector<uint8_t> in_region(n, 0);
    auto note_region_vertex = [&](uint32_t w) {
        if (!in_region[w]) {
            in_region[w] = 1;
            region_vertices.push_back(w);
        }
    };

    std::vector<uint32_t> frontier = v0;
    std::sort(frontier.begin(), frontier.end());
    out.generations.push_back(frontier);

    std::vector<int64_t> dist(n, -1);
    uint32_t m = 0;
    uint32_t k = 0;
    while (!frontier.empty()) {
        std::vector<uint32_t> next_frontier;
        for (uint32_t vm : frontier) {
            ++m;

            // reveal B_r^out(vm): BFS that skips previously revealed edges at
            // vm itself, traverses everything else, and matches free
            // half-edges as it goes
            std::vector<uint8_t> vm_excluded(delta, 0);
            for (uint32_t s = 0; s < delta; ++s)
                if (cursor.matched(vm * delta + s)) vm_excluded[s] = 1;

            const size_t revealed_before = cursor.revealed().size();
            std::vector<uint32_t> visited;
            dist[vm] = 0;
            visited.push_back(vm);
            for (size_t qi = 0; qi < visited.size(); ++qi) {
                const uint32_t w = visited[qi];
                if (dist[w] >= r) continue;
                for (uint32_t s = 0; s < delta; ++s) {
                    const HalfEdgeId h = w * delta + s;
                    if (w == vm && vm_excluded[s]) continue;
                    if (!cursor.matched(h)) cursor.reveal_next(h);
                    const uint32_t x = he_vertex(cursor.partner(h), delta);
                    if (dist[x] < 0) {
                        dist[x] = dist[w] + 1;
                        visited.push_back(x);
                    }
                }
            }
            for (uint32_t w : visited) dist[w] = -1; // reset scratch

            // A_m: the newly revealed edges
            std::vector<HalfEdgePair> new_pairs(cursor.revealed().begin() + revealed_before,
                                                cursor.revealed().end());
            out.ball_edges.push_back(static_cast<uint32_t>(new_pairs.size()));

            std::vector<uint8_t> local_omega;
            uint64_t kappa = 0;
            if (!new_pairs.empty()) {
                // local relabeled subgraph on V(A_m)
                std::unordered_map<uint32_t, uint32_t> local_id;
                std::vector<uint32_t> local_vertex;
                auto localize = [&](uint32_t v) {
                    auto it = local_id.find(v);
                    if (it != local_id.end()) return it->second;
                    const uint32_t id = static_cast<uint32_t>(local_vertex.size());
                    local_id.emplace(v, id);
                    local_vertex.push_back(v);
                    return id;
                };
                std::vector<Edge> local_edges;
                for (const auto& [a, b] : new_pairs)
                    local_edges.push_back({localize(he_vertex(a, delta)), localize(he_vertex(b, delta))});

                // measurable wired boundary: vertices of V(A_m) owning a
                // half-edge not matched inside A_m (still free, or matched to
                // an earlier edge); extra wirings only push the chain up
                std::vector<uint32_t> boundary;
                {
                    std::unordered_map<HalfEdgeId, uint8_t> in_am;
                    for (const auto& [a, b] : new_pairs) {
                        in_am[a] = 1;
                        in_am[b] = 1;
                    }
                    for (uint32_t lv = 0; lv < local_vertex.size(); ++lv) {
                        const uint32_t v = local_vertex[lv];
                        for (uint32_t s = 0; s < delta; ++s) {
                            const HalfEdgeId h = v * delta + s;
                            if (!in_am.count(h)) {
                                boundary.push_back(lv);
                                break;
                            }
                        }
                    }
                }

                Graph local_graph(static_cast<uint32_t>(local_vertex.size()), local_edges);
                std::vector<uint32_t> all_ids(local_edges.size());
                std::iota(all_ids.begin(), all_ids.end(), 0);
                CensoredChain chain(local_graph, all_ids, boundary);

                // gather the stream positions dedicated to A_m, in time order
                std::vector<std::pair<uint64_t, std::pair<uint32_t, double>>> updates;
                for (uint32_t le = 0; le < new_pairs.size(); ++le) {
                    for (const HalfEdgeId h : {new_pairs[le].first, new_pairs[le].second})
                        for (const auto& [s, u] : hits[h]) updates.push_back({s, {le, u}});
                }
                std::sort(updates.begin(), updates.end());
                kappa = updates.size();
                for (const auto& [s, eu] : updates) chain.step(eu.first, eu.second, p, q);
                local_omega = chain.config_on_a();

                for (uint32_t le = 0; le < new_pairs.size(); ++le) {
                    out.revealed_pairs.push_back(new_pairs[le]);
                    out.omega_tilde.push_back(local_omega[le]);
                    const auto& [a, b] = new_pairs[le];
                    note_region_vertex(he_vertex(a, delta));
                    note_region_vertex(he_vertex(b, delta));
                    if (local_omega[le]) uf.unite(he_vertex(a, delta), he_vertex(b, delta));
                }
            }
            out.ball_updates.push_back(kappa);

            // extend the frontier: boundary vertices of the revealed region
            // (free half-edges remaining) connected to V0, not used before.
            // A vertex from an earlier ball can join the cluster through this
            // ball's configuration, so all region vertices are rescanned.
            for (const uint32_t w : region_vertices) {
                if (in_past_generation[w]) continue;
                if (!uf.has_v0[uf.find(w)]) continue;
                bool free_half = false;
                for (uint32_t s = 0; s < delta; ++s)
                    if (!cursor.matched(w * delta + s)) {
                        free_half = true;
                        break;
                    }
                if (!free_half) continue;
                in_past_generation[w] = 1;
                next_frontier.push_back(w);
            }
            out.trace.push_back({m, vm, a0_count + out.revealed_pairs.size(),
                                 static_cast<uint64_t>(frontier.size()), k});
        }
        std::sort(next_frontier.begin(), next_frontier.end());
        frontier.swap(next_frontier);
        out.generations.push_back(frontier);
        ++k;
    }
    // generations holds V_0 .. V_{k_empty} with the last one empty
    out.k_empty = static_cast<uint32_t>(out.generations.size()) - 1;

    cursor.complete_canonically();
    out.graph = cursor.finish();
    return out;
}

ContainmentAudit containment_audit(const JointRevealResult& rr) {
    ContainmentAudit audit;
    const MultiGraph& mg = rr.graph;
    const Graph& g = mg.graph();
    const uint32_t n = rr.n;

    // full wired chain on the same half-edge stream
    ChainState chain(g, rr.p, rr.q, BoundaryCondition::free(), /*wired_start=*/true);
    {
        RandomSource stream(mix_seed(rr.seed, 1));
        const uint32_t H = n * rr.delta;
        for (uint64_t s = 1; s <= rr.t; ++s) {
            const uint32_t h = static_cast<uint32_t>(stream.below(H));
            const double u = stream.u01();
            chain.fk_step(mg.edge_of_halfedge(h), u);
        }
    }

    std::vector<uint8_t> is_a0_edge(g.edge_count(), 0);
    for (const auto& [a, b] : rr.a0_pairs) is_a0_edge[mg.edge_of_halfedge(a)] = 1;

    // S1: vertices connected to V0 through open edges of the full chain off A0
    FlaggedUf uf_full(n);
    for (uint32_t v : rr.v0) uf_full.has_v0[uf_full.find(v)] = 1;
    for (uint32_t e = 0; e < g.edge_count(); ++e)
        if (chain.open(e) && !is_a0_edge[e]) uf_full.unite(g.edge(e).u, g.edge(e).v);

    // S2: vertices connected to V0 in omega_tilde
    FlaggedUf uf_tilde(n);
    for (uint32_t v : rr.v0) uf_tilde.has_v0[uf_tilde.find(v)] = 1;
    for (size_t i = 0; i < rr.revealed_pairs.size(); ++i)
        if (rr.omega_tilde[i])
            uf_tilde.unite(he_vertex(rr.revealed_pairs[i].first, rr.delta),
                           he_vertex(rr.revealed_pairs[i].second, rr.delta));

    audit.contained = true;
    for (uint32_t v = 0; v < n; ++v) {
        const bool in_full = uf_full.has_v0[uf_full.find(v)];
        const bool in_tilde = uf_tilde.has_v0[uf_tilde.find(v)];
        if (in_full) ++audit.full_cluster_vertices;
        if (in_tilde) ++audit.tilde_cluster_vertices;
        if (in_full && !in_tilde) audit.contained = false;
    }
    return audit;
}

// --- branching process -------------------------------------------------------

BranchingResult branching_run(const BranchingConfig& cfg, uint64_t seed, uint64_t pop_cap) {
    if (pop_cap == 0) throw parameter_error("branching_run: pop_cap must be positive");
    RandomSource rng(seed);
    BranchingResult res;
    res.generations.push_back(cfg.z0);
    res.total = cfg.z0;
    uint64_t pop_so_far = cfg.z0;
    while (res.generations.back() > 0) {
        const uint64_t zk = res.generations.back();
        uint64_t next = 0;
        for (uint64_t i = 0; i < zk; ++i) {
            uint64_t kids;
            if (cfg.bad_prob > 0.0 && rng.u01() < cfg.bad_prob) {
                kids = cfg.tree_vertices * pop_so_far;
            } else {
                kids = cfg.progeny ? cfg.progeny(rng) : 0;
            }
            next += kids;
            if (res.total + next >= pop_cap) {
                res.total = pop_cap;
                res.hit_cap = true;
                res.generations.push_back(next);
                return res;
            }
        }
        if (next == 0) break;
        res.generations.push_back(next);
        res.total += next;
        pop_so_far += next;
    }
    return res;
}

// --- progeny sampler ---------------------------------------------------------

namespace {

uint32_t leaves_connected_to_root(const Graph& g, const std::vector<uint8_t>& omega,
                                  const std::vector<uint32_t>& leaves, uint32_t root) {
    std::vector<uint32_t> parent(g.n());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (uint32_t e = 0; e < omega.size(); ++e)
        if (omega[e]) {
            const uint32_t a = find(g.edge(e).u), b = find(g.edge(e).v);
            if (a != b) parent[a] = b;
        }
    const uint32_t root_comp = find(root);
    uint32_t count = 0;
    for (uint32_t l : leaves)
        if (find(l) == root_comp) ++count;
    return count;
}

} // namespace

ProgenySampler::ProgenySampler(uint32_t r, double p, double q, uint32_t delta, uint64_t burn)
    : r_(r), delta_(delta), p_(p), q_(q), burn_(burn) {
    if (r < 1) throw parameter_error("ProgenySampler: r must be at least 1");
    const uint64_t edges = tree_edge_count(delta, r);
    if (burn_ == 0)
        burn_ = static_cast<uint64_t>(std::ceil(50.0 * edges * std::log(static_cast<double>(edges))));
    if (r <= 2 && edges <= 20) {
        const CompleteTree t = build_complete_tree(delta, r, TreeBc::wired_with_root);
        const ExactTable table = enumerate_rc(t.graph, p, q, t.bc);
        law_.assign(t.leaves.size() + 1, 0.0);
        std::vector<uint8_t> omega(t.graph.edge_count());
        for (size_t mask = 0; mask < table.prob.size(); ++mask) {
            for (uint32_t e = 0; e < omega.size(); ++e) omega[e] = (mask >> e) & 1;
            law_[leaves_connected_to_root(t.graph, omega, t.leaves, t.root)] += table.prob[mask];
        }
        cdf_.resize(law_.size());
        double acc = 0.0;
        for (size_t i = 0; i < law_.size(); ++i) {
            acc += law_[i];
            cdf_[i] = acc;
        }
        cdf_.back() = 1.0;
    }
}

uint32_t ProgenySampler::sample(RandomSource& rng) {
    if (!cdf_.empty()) {
        const double u = rng.u01();
        return static_cast<uint32_t>(std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    }
    const CompleteTree t = build_complete_tree(delta_, r_, TreeBc::wired_with_root);
    ChainState chain(t.graph, p_, q_, t.bc, /*wired_start=*/true, DynConnState::Backend::naive);
    UpdateStream stream(rng.bits(), t.graph.edge_count());
    chain.run(burn_, stream);
    return leaves_connected_to_root(t.graph, chain.config(), t.leaves, t.root);
}

uint32_t progeny_sample(uint32_t r, double p, double q, uint32_t delta, uint64_t seed,
                        uint64_t burn) {
    ProgenySampler sampler(r, p, q, delta, burn);
    RandomSource rng(seed);
    return sampler.sample(rng);
}

// --- cluster tails -----------------------------------------------------------

ClusterTailResult cluster_tail(const Graph& g, double p, double q, uint64_t t, int reps,
                               uint64_t seed) {
    const uint32_t n = g.n();
    std::vector<std::vector<uint64_t>> size_counts(reps); // histogram per rep
    std::vector<size_t> max_sizes(reps, 0);

#pragma omp parallel for schedule(dynamic)
    for (int rep = 0; rep < reps; ++rep) {
        ChainState chain(g, p, q, BoundaryCondition::free(), /*wired_start=*/true);
        UpdateStream stream(mix_seed(seed, static_cast<uint64_t>(rep)), g.edge_count());
        chain.run(t, stream);
        std::vector<uint32_t> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](uint32_t x) {
            while (parent[x] != x) {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            return x;
        };
        for (uint32_t e = 0; e < g.edge_count(); ++e)
            if (chain.open(e)) {
                const uint32_t a = find(g.edge(e).u), b = find(g.edge(e).v);
                if (a != b) parent[a] = b;
            }
        std::vector<uint32_t> csize(n, 0);
        for (uint32_t v = 0; v < n; ++v) ++csize[find(v)];
        auto& counts = size_counts[rep];
        counts.assign(n + 1, 0);
        for (uint32_t v = 0; v < n; ++v) {
            const uint32_t s = csize[find(v)];
            ++counts[s];
            max_sizes[rep] = std::max<size_t>(max_sizes[rep], s);
        }
    }

    ClusterTailResult res;
    std::vector<uint64_t> counts(n + 1, 0);
    for (const auto& c : size_counts)
        for (size_t s = 0; s < c.size(); ++s) counts[s] += c[s];
    res.samples = static_cast<uint64_t>(reps) * n;
    res.max_cluster = *std::max_element(max_sizes.begin(), max_sizes.end());
    res.tail.resize(n);
    uint64_t acc = 0;
    for (size_t s = n;; --s) {
        acc += counts[s];
        if (s >= 1) res.tail[s - 1] = static_cast<double>(acc) / res.samples;
        if (s == 1) break;
    }
    std::vector<double> xs, ys;
    for (uint32_t kk = 2; kk <= std::min<uint32_t>(30, n); ++kk) {
        const double tk = res.tail[kk - 1];
        if (tk > 0.0) {
            xs.push_back(kk);
            ys.push_back(std::log(tk));
        }
    }
    res.log_tail_fit = linear_fit(xs, ys);
    return res;
}

// --- induced-boundary sparsity -----------------------------------------------

namespace {

uint32_t sparsity_count_at(const Graph& g, const std::vector<uint8_t>& omega, uint32_t R,
                           uint32_t v, std::vector<uint32_t>& parent,
                           std::vector<uint32_t>& bucket) {
    const Ball b = ball(g, v, R);
    std::vector<uint8_t> in_ball_edge(g.edge_count(), 0);
    for (uint32_t e : b.edge_ids) in_ball_edge[e] = 1;
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (uint32_t e = 0; e < g.edge_count(); ++e)
        if (omega[e] && !in_ball_edge[e]) {
            const uint32_t a = find(g.edge(e).u), bb = find(g.edge(e).v);
            if (a != bb) parent[a] = bb;
        }
    // count members of V(B) per outside-component; non-singleton classes only
    for (uint32_t w : b.vertices) bucket[find(w)] = 0;
    for (uint32_t w : b.vertices) ++bucket[find(w)];
    uint32_t cnt = 0;
    for (uint32_t w : b.vertices)
        if (bucket[find(w)] >= 2) ++cnt;
    return cnt;
}

SparsityResult sparsity_impl(const Graph& g, const std::vector<uint8_t>& omega, uint32_t R,
                             uint32_t K, bool parallel) {
    if (omega.size() != g.edge_count()) throw usage_error("sparsity: config size mismatch");
    SparsityResult res;
    res.counts.assign(g.n(), 0);
    if (parallel) {
#pragma omp parallel
        {
            std::vector<uint32_t> parent(g.n()), bucket(g.n(), 0);
#pragma omp for schedule(dynamic, 16)
            for (int64_t v = 0; v < static_cast<int64_t>(g.n()); ++v)
                res.counts[v] = sparsity_count_at(g, omega, R, static_cast<uint32_t>(v), parent,
                                                  bucket);
        }
    } else {
        std::vector<uint32_t> parent(g.n()), bucket(g.n(), 0);
        for (uint32_t v = 0; v < g.n(); ++v)
            res.counts[v] = sparsity_count_at(g, omega, R, v, parent, bucket);
    }
    res.max_count = res.counts.empty() ? 0 : *std::max_element(res.counts.begin(), res.counts.end());
    res.is_kr_sparse = res.max_count <= K;
    return res;
}

} // namespace

SparsityResult sparsity(const Graph& g, const std::vector<uint8_t>& omega, uint32_t R, uint32_t K) {
    return sparsity_impl(g, omega, R, K, true);
}

SparsityResult sparsity_serial(const Graph& g, const std::vector<uint8_t>& omega, uint32_t R,
                               uint32_t K) {
    return sparsity_impl(g, omega, R, K, false);
}

} // namespace rc
