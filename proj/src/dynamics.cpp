#include "rc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rc/errors.hpp"
#include "rc/stats.hpp"
#include "rc/tree.hpp"

namespace rc {

namespace {

std::vector<uint8_t> constant_config(uint32_t m, bool wired) {
    return std::vector<uint8_t>(m, wired ? 1 : 0);
}

} // namespace

ChainState::ChainState(const Graph& g, double p, double q, BoundaryCondition bc, bool wired_start,
                       DynConnState::Backend backend)
    : ChainState(g, p, q, std::move(bc), constant_config(g.edge_count(), wired_start), backend) {}

ChainState::ChainState(const Graph& g, double p, double q, BoundaryCondition bc,
                       const std::vector<uint8_t>& init, DynConnState::Backend backend)
    : graph_(g),
      p_(p),
      q_(q),
      hat_p_(rc::hat_p(p, q)),
      bc_(std::move(bc)),
      conn_(graph_, bc_, init, backend) {
    if (q < 1.0) throw parameter_error("ChainState: monotone dynamics needs q >= 1");
}

void ChainState::fk_step(uint32_t e, double u) {
    // Resample e against its conditional law: open with probability hat_p if
    // e is a cut-edge (under the wirings, independent of e's own state), p
    // otherwise.
    const bool cut = conn_.is_cut_edge(e);
    const bool open = u <= (cut ? hat_p_ : p_);
    conn_.toggle(e, open);
    ++t_;
    if (events_) events_->push_back({t_, e, static_cast<uint8_t>(open)});
}

void ChainState::run(uint64_t steps, UpdateStream& stream) {
    if (stream.edge_count() != graph_.edge_count())
        throw usage_error("run: stream drawn over a different edge count");
    for (uint64_t i = 0; i < steps; ++i) {
        const auto [e, u] = stream.next();
        fk_step(e, u);
    }
}

GrandCouplingResult grand_coupling_run(const Graph& g, double p, double q,
                                       const BoundaryCondition& bc,
                                       const std::vector<std::vector<uint8_t>>& inits, uint64_t T,
                                       uint64_t seed, bool audit_order) {
    GrandCouplingResult res;
    if (inits.empty()) return res;
    const uint32_t m = g.edge_count();
    std::vector<ChainState> chains;
    chains.reserve(inits.size());
    for (const auto& init : inits) chains.emplace_back(g, p, q, bc, init);

    // edges on which the chains currently disagree
    size_t disagree = 0;
    std::vector<uint8_t> same(m, 1);
    for (uint32_t e = 0; e < m; ++e) {
        for (size_t c = 1; c < chains.size(); ++c)
            if (chains[c].open(e) != chains[0].open(e)) {
                same[e] = 0;
                ++disagree;
                break;
            }
    }
    if (disagree == 0) res.coupling_time = 0;

    UpdateStream stream(seed, m);
    for (uint64_t t = 1; t <= T && !res.coupling_time; ++t) {
        const auto [e, u] = stream.next();
        bool all_equal = true;
        for (size_t c = 0; c < chains.size(); ++c) {
            chains[c].fk_step(e, u);
            if (chains[c].open(e) != chains[0].open(e)) all_equal = false;
        }
        if (audit_order) {
            // with ordered inits only the updated edge can break the order
            for (size_t c = 0; c + 1 < chains.size(); ++c)
                if (chains[c].open(e) > chains[c + 1].open(e)) res.order_preserved = false;
        }
        if (all_equal != (same[e] != 0)) {
            disagree += all_equal ? -1 : 1;
            same[e] = all_equal ? 1 : 0;
        }
        if (disagree == 0) res.coupling_time = t;
    }
    for (auto& c : chains) res.finals.push_back(c.config());
    return res;
}

// --- censored chain ----------------------------------------------------------

namespace {

std::vector<uint32_t> default_censored_boundary(const Graph& g,
                                                const std::vector<uint32_t>& a_edges) {
    std::vector<char> in_a_vertex(g.n(), 0);
    for (uint32_t e : a_edges) {
        in_a_vertex[g.edge(e).u] = 1;
        in_a_vertex[g.edge(e).v] = 1;
    }
    std::vector<uint32_t> boundary;
    for (uint32_t v = 0; v < g.n(); ++v) {
        if (!in_a_vertex[v]) continue;
        for (uint32_t e : g.incident(v)) {
            if (!in_a_vertex[g.other_endpoint(e, v)]) {
                boundary.push_back(v);
                break;
            }
        }
    }
    return boundary;
}

} // namespace

CensoredChain::CensoredChain(const Graph& g, std::vector<uint32_t> a_edges)
    : CensoredChain(g, a_edges, default_censored_boundary(g, a_edges)) {}

CensoredChain::CensoredChain(const Graph& g, std::vector<uint32_t> a_edges,
                             std::vector<uint32_t> wired_boundary)
    : a_edges_(std::move(a_edges)),
      a_index_(g.edge_count(), -1),
      boundary_(std::move(wired_boundary)),
      sub_(),
      conn_(Graph(0, {}), BoundaryCondition::free(), DynConnState::Backend::naive) {
    std::vector<Edge> sub_edges;
    for (size_t i = 0; i < a_edges_.size(); ++i) {
        const uint32_t e = a_edges_[i];
        if (e >= g.edge_count()) throw usage_error("CensoredChain: edge id out of range");
        if (a_index_[e] != -1) throw usage_error("CensoredChain: duplicate edge in A");
        a_index_[e] = static_cast<int32_t>(i);
        sub_edges.push_back(g.edge(e));
    }
    std::sort(boundary_.begin(), boundary_.end());
    boundary_.erase(std::unique(boundary_.begin(), boundary_.end()), boundary_.end());
    BoundaryCondition bc;
    if (boundary_.size() >= 2) bc = BoundaryCondition::wired(boundary_);
    sub_ = Graph(g.n(), std::move(sub_edges));
    conn_ = DynConnState(sub_, bc, constant_config(static_cast<uint32_t>(a_edges_.size()), true),
                         a_edges_.size() >= 512 ? DynConnState::Backend::forest
                                                : DynConnState::Backend::naive);
}

void CensoredChain::step(uint32_t e, double u, double p, double q) {
    const int32_t local = e < static_cast<int64_t>(a_index_.size()) ? a_index_[e] : -1;
    if (local < 0) return; // censored
    const double hp = hat_p(p, q);
    const bool cut = conn_.is_cut_edge(static_cast<uint32_t>(local));
    conn_.toggle(static_cast<uint32_t>(local), u <= (cut ? hp : p));
}

std::vector<uint8_t> CensoredChain::config_on_a() const { return conn_.config(); }

std::vector<uint8_t> censored_localized_chain(const Graph& g, const std::vector<uint32_t>& a_edges,
                                              UpdateStream& stream, uint64_t t, double p,
                                              double q) {
    CensoredChain chain(g, a_edges);
    for (uint64_t i = 0; i < t; ++i) {
        const auto [e, u] = stream.next();
        chain.step(e, u, p, q);
    }
    return chain.config_on_a();
}

// --- Swendsen-Wang -----------------------------------------------------------

void sw_step(SpinConfig& spins, const Graph& g, double p, uint32_t q, RandomSource& rng) {
    if (q < 1) throw parameter_error("sw_step: q must be a positive integer");
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("sw_step: p must lie in (0,1)");
    if (spins.spins.size() != g.n()) throw usage_error("sw_step: spin count mismatch");
    std::vector<uint32_t> parent(g.n());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const Edge& ed : g.edges()) {
        if (spins.spins[ed.u] != spins.spins[ed.v]) continue;
        if (rng.u01() <= p) {
            const uint32_t a = find(ed.u), b = find(ed.v);
            if (a != b) parent[a] = b;
        }
    }
    std::vector<uint32_t> color(g.n(), UINT32_MAX);
    for (uint32_t v = 0; v < g.n(); ++v) {
        const uint32_t r = find(v);
        if (color[r] == UINT32_MAX) color[r] = rng.below32(q);
        spins.spins[v] = color[r];
    }
}

SpinConfig potts_from_rc(const Graph& g, const std::vector<uint8_t>& omega, uint32_t q,
                         uint64_t seed) {
    if (q < 1) throw parameter_error("potts_from_rc: q must be a positive integer");
    if (omega.size() != g.edge_count()) throw usage_error("potts_from_rc: config size mismatch");
    RandomSource rng(seed);
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
    SpinConfig sc;
    sc.spins.assign(g.n(), 0);
    std::vector<uint32_t> color(g.n(), UINT32_MAX);
    for (uint32_t v = 0; v < g.n(); ++v) {
        const uint32_t r = find(v);
        if (color[r] == UINT32_MAX) color[r] = rng.below32(q);
        sc.spins[v] = color[r];
    }
    return sc;
}

// --- coupling time harness ----------------------------------------------------

namespace {

uint64_t default_cap(const Graph& g) {
    const double n = g.n();
    return static_cast<uint64_t>(std::ceil(200.0 * n * std::max(1.0, std::log(n))));
}

// wired/free pair on one stream; returns coupling time or cap
std::pair<uint64_t, bool> one_coupling_rep(const Graph& g, double p, double q, uint64_t seed,
                                           uint64_t cap) {
    const BoundaryCondition free_bc;
    ChainState upper(g, p, q, free_bc, true);
    ChainState lower(g, p, q, free_bc, false);
    size_t disagree = 0;
    for (uint32_t e = 0; e < g.edge_count(); ++e)
        if (upper.open(e) != lower.open(e)) ++disagree;
    if (disagree == 0) return {0, false};
    UpdateStream stream(seed, g.edge_count());
    for (uint64_t t = 1; t <= cap; ++t) {
        const auto [e, u] = stream.next();
        const bool before = upper.open(e) != lower.open(e);
        upper.fk_step(e, u);
        lower.fk_step(e, u);
        const bool after = upper.open(e) != lower.open(e);
        if (before != after) disagree += after ? 1 : -1;
        if (disagree == 0) return {t, false};
    }
    return {cap, true};
}

CouplingTimeSummary finalize_summary(std::vector<uint64_t>&& times, std::vector<uint8_t>&& cens,
                                     uint64_t cap) {
    CouplingTimeSummary s;
    s.cap = cap;
    s.censored = std::move(cens);
    s.times.reserve(times.size());
    for (uint64_t t : times) s.times.push_back(static_cast<double>(t));
    s.censored_count = std::count(s.censored.begin(), s.censored.end(), uint8_t{1});
    s.median_time = median(s.times);
    s.mean_time = mean(s.times);
    s.max_time = s.times.empty() ? 0.0 : *std::max_element(s.times.begin(), s.times.end());
    return s;
}

} // namespace

CouplingTimeSummary coupling_time_estimate_serial(const Graph& g, double p, double q, int reps,
                                                  uint64_t seed, uint64_t cap_T) {
    const uint64_t cap = cap_T ? cap_T : default_cap(g);
    std::vector<uint64_t> times(reps);
    std::vector<uint8_t> cens(reps);
    for (int r = 0; r < reps; ++r) {
        auto [t, c] = one_coupling_rep(g, p, q, mix_seed(seed, static_cast<uint64_t>(r)), cap);
        times[r] = t;
        cens[r] = c;
    }
    return finalize_summary(std::move(times), std::move(cens), cap);
}

CouplingTimeSummary coupling_time_estimate(const Graph& g, double p, double q, int reps,
                                           uint64_t seed, uint64_t cap_T) {
    const uint64_t cap = cap_T ? cap_T : default_cap(g);
    std::vector<uint64_t> times(reps);
    std::vector<uint8_t> cens(reps);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r) {
        auto [t, c] = one_coupling_rep(g, p, q, mix_seed(seed, static_cast<uint64_t>(r)), cap);
        times[r] = t;
        cens[r] = c;
    }
    return finalize_summary(std::move(times), std::move(cens), cap);
}

} // namespace rc
