#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rc/boundary.hpp"
#include "rc/graph.hpp"

namespace rc {

// Conditional open probability of a cut-edge: p / (q(1-p) + p).
double hat_p(double p, double q);

struct TreeParams {
    double p = 0;
    double q = 0;
    uint32_t delta = 0;
    uint32_t d = 0;   // delta - 1
    double mu = 0;    // p/q + 1 - p

    static TreeParams make(double p, double q, uint32_t delta);
};

// Root-to-boundary connectivity map of the wired d-ary tree:
// f(x) = [(mu + p(1-1/q)x)^d - (mu - (p/q)x)^d] /
//        [(mu + p(1-1/q)x)^d + (q-1)(mu - (p/q)x)^d].
// Evaluated via expm1/log1p so tiny x keeps full relative precision.
double f_recursion(double x, const TreeParams& params);

// h-fold iterate of f from phi_0 = 1: the probability that the root of the
// wired d-ary tree of depth h reaches the boundary.
double phi(uint32_t h, const TreeParams& params);

// Same probability for the complete tree whose root has delta children
// (one final map with exponent delta applied to phi(h-1)).
double phi_root(uint32_t h, const TreeParams& params);

// phi(h+1)/phi(h); switches to log-space iteration once iterates underflow.
double decay_rate(const TreeParams& params, uint32_t h);

struct PuOptions {
    double tol = 1e-7;
    uint32_t grid = 2048;   // fixed-point search resolution
    uint32_t refine = 60;   // golden-section refinement steps
};

// Uniqueness threshold: the smallest p at which the recursion admits a
// positive fixed point (equivalently the iteration from 1 stops dying out).
double p_u(double q, uint32_t delta, double tol = 1e-7);
double p_u(double q, uint32_t delta, const PuOptions& opts);

enum class TreeBc { free_bc, wired, wired_with_root };

struct CompleteTree {
    Graph graph;
    uint32_t root = 0;
    uint32_t height = 0;
    uint32_t delta = 0;
    std::vector<uint32_t> leaves;
    std::vector<uint32_t> depth; // per vertex
    BoundaryCondition bc;
    TreeBc tag = TreeBc::free_bc;
};

// Complete tree of depth h: the root has delta children, every other internal
// vertex has delta-1 children. bc wires the leaves (and optionally the root).
CompleteTree build_complete_tree(uint32_t delta, uint32_t h, TreeBc tag);

// Variant whose root has only delta-1 children; the tree the recursion walks.
CompleteTree build_dary_tree(uint32_t delta, uint32_t h, TreeBc tag);

// csv rows: q,delta,p_u,hat_p_at_p_u,d_hat_p
void export_threshold_table(std::ostream& os, const std::vector<double>& qs, uint32_t delta,
                            double tol = 1e-7);

} // namespace rc
