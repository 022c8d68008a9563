#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rc/boundary.hpp"
#include "rc/graph.hpp"

namespace rc {

/// Full probability table of the random-cluster measure on a small graph.
/// prob[mask] is the probability of the edge configuration whose bit i is the
/// state of edge i.
struct ExactTable {
    Graph graph;
    BoundaryCondition bc;
    double p = 0;
    double q = 0;
    double Z = 0;
    double log_Z = 0;
    std::vector<double> prob;

    uint32_t edge_count() const { return graph.edge_count(); }
};

// Unnormalized weight p^|w| (1-p)^(|E|-|w|) q^c(w;bc). Computed in log space
// with one exponentiation.
double rc_weight(const Graph& g, const std::vector<uint8_t>& omega, double p, double q,
                 const BoundaryCondition& bc);
double rc_log_weight(const Graph& g, const std::vector<uint8_t>& omega, double p, double q,
                     const BoundaryCondition& bc);

// Exhaustive enumeration; refuses more than max_edges edges.
ExactTable enumerate_rc(const Graph& g, double p, double q, const BoundaryCondition& bc,
                        uint32_t max_edges = 24);
// Serial reference kernel for the OpenMP enumeration above.
ExactTable enumerate_rc_serial(const Graph& g, double p, double q, const BoundaryCondition& bc,
                               uint32_t max_edges = 24);

// Projection onto a subset of edges: entry s is the probability that the
// selected edges realize the bit pattern s (bit j = edges[j]).
std::vector<double> marginal(const ExactTable& t, const std::vector<uint32_t>& edges);
double edge_marginal(const ExactTable& t, uint32_t e);

// Half L1 distance between the two projections; tables must share the edge index.
double tv_distance(const ExactTable& a, const ExactTable& b, const std::vector<uint32_t>& edges);

// D(phi, phi'): difference of class counts for comparable partitions, summed
// against the join otherwise.
int bc_distance(const BoundaryCondition& phi, const BoundaryCondition& phi_prime, uint32_t n);

// Checks q^(-2D) pi' <= pi <= q^(2D) pi' pointwise with 1e-9 relative slack.
bool ratio_bound_check(const Graph& g, double p, double q, const BoundaryCondition& phi,
                       const BoundaryCondition& phi_prime);

/// One step of the single-edge dynamics as a row-stochastic matrix over the
/// 2^|E| configurations, stored via the per-(state, edge) open probability.
struct TransitionMatrix {
    uint32_t edge_count = 0;
    size_t dim = 0;
    std::vector<double> rho; // dim * edge_count, open probability after updating edge e in state x

    double open_prob(size_t x, uint32_t e) const { return rho[x * edge_count + e]; }
    double entry(size_t x, size_t y) const;
    // (Pv)(x) = sum_y P(x,y) v(y)
    std::vector<double> apply(const std::vector<double>& v) const;
    // (vP)(y) = sum_x v(x) P(x,y)
    std::vector<double> apply_left(const std::vector<double>& v) const;
};

TransitionMatrix transition_matrix(const Graph& g, double p, double q, const BoundaryCondition& bc,
                                   uint32_t max_edges = 14);

// 1 - |second largest eigenvalue| of the (reversible) transition matrix.
double spectral_gap(const TransitionMatrix& tm, const ExactTable& table);

// Stationary distribution computed from the matrix itself.
std::vector<double> stationary_distribution(const TransitionMatrix& tm);

struct LsiEstimate {
    double alpha = 0;
    std::vector<double> f; // achieving test function
};

// Upper-bounding search for the log-Sobolev constant: minimizes the Dirichlet
// form over entropy across random and structured test functions plus local
// descent. Throws on single-state chains.
LsiEstimate log_sobolev_estimate(const TransitionMatrix& tm, const ExactTable& table, int trials,
                                 uint64_t seed = 1);

double dirichlet_form(const TransitionMatrix& tm, const ExactTable& table,
                      const std::vector<double>& f);
double entropy_of_square(const ExactTable& table, const std::vector<double>& f);

// Regression snapshot rows: "bitmask,probability", sorted by bitmask.
void export_table(const ExactTable& t, std::ostream& os);

} // namespace rc
