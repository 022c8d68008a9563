#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rc/graph.hpp"
#include "rc/multigraph.hpp"
#include "rc/rng.hpp"
#include "rc/stats.hpp"

namespace rc {

// |E(T_r)| and |V(T_r)| of the complete tree whose root has delta children.
uint64_t tree_edge_count(uint32_t delta, uint32_t r);
uint64_t tree_vertex_count(uint32_t delta, uint32_t r);

// Burn-in step count ceil(c0 * n ln n * tmix_tree / |E(T_r)|). tmix_tree = 0
// selects the |E(T_r)| log |E(T_r)| proxy for the local mixing time.
uint64_t t_burn(double c0, uint32_t r, uint32_t n, uint32_t delta, double tmix_tree = 0.0);

struct RevealTraceRow {
    uint32_t m;          // ball counter
    uint32_t v_m;        // frontier vertex whose ball was revealed
    uint64_t a_size;     // |A_m| including A0, after this step
    uint64_t frontier_size;
    uint32_t k;          // generation
};

struct JointRevealResult {
    uint32_t n = 0, delta = 0, r = 0;
    double p = 0, q = 0;
    uint64_t t = 0, seed = 0;
    std::vector<HalfEdgePair> a0_pairs;
    std::vector<HalfEdgePair> revealed_pairs; // A_final \ A0 in reveal order
    std::vector<uint8_t> omega_tilde;         // aligned with revealed_pairs
    std::vector<uint32_t> v0;
    std::vector<std::vector<uint32_t>> generations; // V_0 .. V_{k_empty}
    uint32_t k_empty = 0;
    std::vector<RevealTraceRow> trace;
    std::vector<uint64_t> ball_updates; // update count kappa per ball
    std::vector<uint32_t> ball_edges;   // newly revealed edges per ball
    MultiGraph graph;                   // matching completed canonically
};

// Joint revealing of the random graph with localized wired-chain
// configurations: per frontier vertex, expose the out-ball of radius r on the
// matching, replay the update triplet that the shared stream dedicates to the
// new edges, run the localized wired chain on them, and extend the frontier
// by the newly connected boundary vertices. Frontier order within a
// generation is ascending vertex id.
JointRevealResult joint_reveal(uint32_t n, uint32_t delta, double p, double q,
                               const std::vector<HalfEdgePair>& a0_pairs,
                               const std::vector<uint32_t>& v0, uint32_t r, uint64_t t,
                               uint64_t seed);

struct ContainmentAudit {
    bool contained = false;
    size_t full_cluster_vertices = 0;  // cluster of V0 in the full wired chain, off A0
    size_t tilde_cluster_vertices = 0; // cluster of V0 in omega_tilde
};

// Reruns the full-graph wired chain on the same shared stream and checks that
// its V0-cluster (off A0) is contained in the omega_tilde cluster.
ContainmentAudit containment_audit(const JointRevealResult& rr);

struct BranchingConfig {
    uint64_t z0 = 1;
    double bad_prob = 0.0;      // n^(-1/2) at the paper's scale
    uint64_t tree_vertices = 1; // |V(T_r)| multiplier of the Bad progeny
    std::function<uint32_t(RandomSource&)> progeny;
};

struct BranchingResult {
    std::vector<uint64_t> generations; // Z_0, Z_1, ...
    uint64_t total = 0;
    bool hit_cap = false;
};

// Size-dependent branching process: each individual of generation k is Bad
// with probability bad_prob (progeny = tree_vertices * population so far),
// otherwise draws from the progeny sampler.
BranchingResult branching_run(const BranchingConfig& cfg, uint64_t seed,
                              uint64_t pop_cap = 1000000);

/// Law of the number of leaves of T_r in the open component of the root under
/// the leaves-plus-root-wired measure: exact by enumeration for small trees,
/// a burned-in chain otherwise.
class ProgenySampler {
public:
    ProgenySampler(uint32_t r, double p, double q, uint32_t delta, uint64_t burn = 0);

    uint32_t sample(RandomSource& rng);
    bool exact() const { return !cdf_.empty(); }
    const std::vector<double>& exact_law() const { return law_; }
    uint64_t burn_steps() const { return burn_; }

private:
    uint32_t r_, delta_;
    double p_, q_;
    uint64_t burn_;
    std::vector<double> law_;
    std::vector<double> cdf_;
};

uint32_t progeny_sample(uint32_t r, double p, double q, uint32_t delta, uint64_t seed,
                        uint64_t burn = 0);

struct ClusterTailResult {
    std::vector<double> tail; // tail[k] = P(|C_v| >= k), index from 0 == k=1
    LinFit log_tail_fit;      // log tail vs k over k in [2,30]
    size_t max_cluster = 0;
    uint64_t samples = 0;
};

// Wired-start chain for t steps, reps times; empirical tail of the
// per-vertex cluster size over all vertices and reps.
ClusterTailResult cluster_tail(const Graph& g, double p, double q, uint64_t t, int reps,
                               uint64_t seed);

struct SparsityResult {
    std::vector<uint32_t> counts; // per vertex: vertices of B_R(v) in non-singleton induced classes
    uint32_t max_count = 0;
    bool is_kr_sparse = false;
};

// Boundary condition induced on each B_R(v) by omega restricted to the edges
// outside the ball; counts vertices in non-singleton classes.
SparsityResult sparsity(const Graph& g, const std::vector<uint8_t>& omega, uint32_t R, uint32_t K);
SparsityResult sparsity_serial(const Graph& g, const std::vector<uint8_t>& omega, uint32_t R,
                               uint32_t K);

} // namespace rc
