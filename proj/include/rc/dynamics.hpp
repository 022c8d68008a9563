#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rc/boundary.hpp"
#include "rc/connectivity.hpp"
#include "rc/graph.hpp"
#include "rc/rng.hpp"

namespace rc {

/// Deterministic seeded sequence of (edge index, uniform in [0,1)) update
/// pairs. One stream may drive any number of coupled chains over the same
/// edge index space.
class UpdateStream {
public:
    UpdateStream(uint64_t seed, uint32_t edge_count)
        : rng_(seed), edge_count_(edge_count) {}

    struct Update {
        uint32_t edge;
        double u;
    };

    Update next() {
        ++position_;
        const uint32_t e = rng_.below32(edge_count_);
        return {e, rng_.u01()};
    }

    uint64_t position() const { return position_; }
    uint32_t edge_count() const { return edge_count_; }

private:
    RandomSource rng_;
    uint64_t position_ = 0;
    uint32_t edge_count_;
};

struct TrajectoryEvent {
    uint64_t step;
    uint32_t edge;
    uint8_t new_state;
};

/// Single FK-dynamics chain: configuration + dynamic connectivity + step
/// counter. Single-owner.
class ChainState {
public:
    ChainState(const Graph& g, double p, double q, BoundaryCondition bc, bool wired_start,
               DynConnState::Backend backend = DynConnState::Backend::automatic);
    ChainState(const Graph& g, double p, double q, BoundaryCondition bc,
               const std::vector<uint8_t>& init,
               DynConnState::Backend backend = DynConnState::Backend::automatic);

    void fk_step(uint32_t e, double u);
    void run(uint64_t steps, UpdateStream& stream);

    const std::vector<uint8_t>& config() const { return conn_.config(); }
    bool open(uint32_t e) const { return conn_.open(e); }
    size_t open_count() const { return conn_.open_count(); }
    uint64_t steps_taken() const { return t_; }
    double p() const { return p_; }
    double q() const { return q_; }
    double hat_p() const { return hat_p_; }
    const Graph& graph() const { return graph_; }
    DynConnState& connectivity() { return conn_; }
    const DynConnState& connectivity() const { return conn_; }

    // Optional step event log (step,edge_index,new_state rows).
    void set_event_log(std::vector<TrajectoryEvent>* sink) { events_ = sink; }

private:
    Graph graph_; // held by value so chains never dangle
    double p_, q_, hat_p_;
    BoundaryCondition bc_;
    DynConnState conn_;
    uint64_t t_ = 0;
    std::vector<TrajectoryEvent>* events_ = nullptr;
};

struct GrandCouplingResult {
    std::optional<uint64_t> coupling_time; // empty if not coupled within T
    bool order_preserved = true;           // only audited when requested
    std::vector<std::vector<uint8_t>> finals;
};

// Runs |inits| chains on one shared stream; returns the first step at which
// all chains agree. With audit_order, asserts the pathwise ordering of
// consecutive chains after every step (inits must be sorted increasingly).
GrandCouplingResult grand_coupling_run(const Graph& g, double p, double q,
                                       const BoundaryCondition& bc,
                                       const std::vector<std::vector<uint8_t>>& inits, uint64_t T,
                                       uint64_t seed, bool audit_order = false);

/// Localized chain on an edge subset A: starts all-wired, ignores updates
/// outside A, resamples inside A against the wired-boundary measure on A.
/// Consumes stream positions one-for-one with any full chain on the same
/// stream.
class CensoredChain {
public:
    // With no explicit boundary the wired set is the vertices of V(A)
    // adjacent to V(G)\V(A). The revealing procedure passes its own set.
    CensoredChain(const Graph& g, std::vector<uint32_t> a_edges);
    CensoredChain(const Graph& g, std::vector<uint32_t> a_edges,
                  std::vector<uint32_t> wired_boundary);

    // Applies one shared-stream update (edge in the full graph's indexing).
    void step(uint32_t e, double u, double p, double q);

    // Configuration restricted to A, aligned with a_edges order.
    std::vector<uint8_t> config_on_a() const;
    const std::vector<uint32_t>& a_edges() const { return a_edges_; }

    // Vertices of V(A) adjacent to the rest of the graph (wired together).
    const std::vector<uint32_t>& wired_boundary() const { return boundary_; }

private:
    std::vector<uint32_t> a_edges_;
    std::vector<int32_t> a_index_; // full edge id -> index in a_edges_, -1 otherwise
    std::vector<uint32_t> boundary_;
    Graph sub_;                  // subgraph (V, A) with local edge ids
    DynConnState conn_;
};

std::vector<uint8_t> censored_localized_chain(const Graph& g, const std::vector<uint32_t>& a_edges,
                                              UpdateStream& stream, uint64_t t, double p, double q);

struct SpinConfig {
    std::vector<uint32_t> spins; // values in {0,...,q-1}
};

// One Swendsen-Wang step: percolate monochromatic edges with probability p,
// then recolor every component uniformly.
void sw_step(SpinConfig& spins, const Graph& g, double p, uint32_t q, RandomSource& rng);

// Edwards-Sokal spin assignment: uniform spin per omega-component.
SpinConfig potts_from_rc(const Graph& g, const std::vector<uint8_t>& omega, uint32_t q,
                         uint64_t seed);

struct CouplingTimeSummary {
    std::vector<double> times;    // per rep; capped reps hold the cap value
    std::vector<uint8_t> censored;
    size_t censored_count = 0;
    uint64_t cap = 0;
    double median_time = 0;
    double mean_time = 0;
    double max_time = 0;
};

// Wired/free coupling times under the grand coupling, reps fanned out over a
// worker pool (each rep owns its stream; results in rep order).
CouplingTimeSummary coupling_time_estimate(const Graph& g, double p, double q, int reps,
                                           uint64_t seed, uint64_t cap_T = 0);
CouplingTimeSummary coupling_time_estimate_serial(const Graph& g, double p, double q, int reps,
                                                  uint64_t seed, uint64_t cap_T = 0);

} // namespace rc
