#include "rc/exact.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>

#include "rc/errors.hpp"
#include "rc/rng.hpp"

namespace rc {

namespace {

void check_params(double p, double q) {
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("p must lie in (0,1)");
    if (!(q > 0.0)) throw parameter_error("q must be positive");
}

// Flat union-find sized for repeated reuse inside mask loops.
struct Uf {
    std::vector<uint32_t> parent;
    explicit Uf(uint32_t n) : parent(n) {}
    void reset() {
        for (uint32_t i = 0; i < parent.size(); ++i) parent[i] = i;
    }
    uint32_t find(uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    // returns true if a merge happened
    bool unite(uint32_t a, uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

uint32_t component_count_of_mask(const Graph& g, uint64_t mask, const std::vector<Edge>& ghosts,
                                 Uf& uf) {
    uf.reset();
    uint32_t comps = g.n();
    const auto& edges = g.edges();
    for (uint32_t e = 0; e < edges.size(); ++e)
        if ((mask >> e) & 1 && edges[e].u != edges[e].v)
            if (uf.unite(edges[e].u, edges[e].v)) --comps;
    for (const Edge& ge : ghosts)
        if (uf.unite(ge.u, ge.v)) --comps;
    return comps;
}

ExactTable enumerate_impl(const Graph& g, double p, double q, const BoundaryCondition& bc,
                          uint32_t max_edges, bool parallel) {
    check_params(p, q);
    const uint32_t m = g.edge_count();
    if (m > max_edges)
        throw size_error("enumerate_rc: " + std::to_string(m) + " edges exceeds cap of " +
                         std::to_string(max_edges));
    const size_t dim = size_t{1} << m;
    const std::vector<Edge> ghosts = bc.ghost_edges();
    const double log_p = std::log(p), log_1p = std::log1p(-p), log_q = std::log(q);

    std::vector<double> logw(dim);
    if (parallel) {
#pragma omp parallel
        {
            Uf uf(g.n());
#pragma omp for schedule(static, 4096)
            for (int64_t mask = 0; mask < static_cast<int64_t>(dim); ++mask) {
                const int open = __builtin_popcountll(static_cast<uint64_t>(mask));
                const uint32_t c = component_count_of_mask(g, mask, ghosts, uf);
                logw[mask] = open * log_p + (int(m) - open) * log_1p + c * log_q;
            }
        }
    } else {
        Uf uf(g.n());
        for (uint64_t mask = 0; mask < dim; ++mask) {
            const int open = __builtin_popcountll(mask);
            const uint32_t c = component_count_of_mask(g, mask, ghosts, uf);
            logw[mask] = open * log_p + (int(m) - open) * log_1p + c * log_q;
        }
    }

    // one exponentiation pass against the running max, summed serially so the
    // result does not depend on the thread count
    const double shift = *std::max_element(logw.begin(), logw.end());
    double total = 0.0;
    for (double lw : logw) total += std::exp(lw - shift);

    ExactTable t;
    t.graph = g;
    t.bc = bc;
    t.p = p;
    t.q = q;
    t.log_Z = shift + std::log(total);
    t.Z = std::exp(t.log_Z);
    t.prob.resize(dim);
    for (size_t mask = 0; mask < dim; ++mask) t.prob[mask] = std::exp(logw[mask] - shift) / total;
    return t;
}

} // namespace

double rc_log_weight(const Graph& g, const std::vector<uint8_t>& omega, double p, double q,
                     const BoundaryCondition& bc) {
    check_params(p, q);
    if (omega.size() != g.edge_count()) throw usage_error("rc_weight: config size mismatch");
    uint64_t mask = 0;
    for (uint32_t e = 0; e < omega.size(); ++e)
        if (omega[e]) mask |= uint64_t{1} << e;
    Uf uf(g.n());
    const std::vector<Edge> ghosts = bc.ghost_edges();
    const uint32_t c = component_count_of_mask(g, mask, ghosts, uf);
    const int open = __builtin_popcountll(mask);
    return open * std::log(p) + (int(g.edge_count()) - open) * std::log1p(-p) + c * std::log(q);
}

double rc_weight(const Graph& g, const std::vector<uint8_t>& omega, double p, double q,
                 const BoundaryCondition& bc) {
    return std::exp(rc_log_weight(g, omega, p, q, bc));
}

ExactTable enumerate_rc(const Graph& g, double p, double q, const BoundaryCondition& bc,
                        uint32_t max_edges) {
    return enumerate_impl(g, p, q, bc, max_edges, true);
}

ExactTable enumerate_rc_serial(const Graph& g, double p, double q, const BoundaryCondition& bc,
                               uint32_t max_edges) {
    return enumerate_impl(g, p, q, bc, max_edges, false);
}

std::vector<double> marginal(const ExactTable& t, const std::vector<uint32_t>& edges) {
    for (uint32_t e : edges)
        if (e >= t.edge_count()) throw usage_error("marginal: edge id out of range");
    std::vector<double> out(size_t{1} << edges.size(), 0.0);
    for (size_t mask = 0; mask < t.prob.size(); ++mask) {
        size_t sub = 0;
        for (size_t j = 0; j < edges.size(); ++j)
            if ((mask >> edges[j]) & 1) sub |= size_t{1} << j;
        out[sub] += t.prob[mask];
    }
    return out;
}

double edge_marginal(const ExactTable& t, uint32_t e) {
    return marginal(t, {e})[1];
}

double tv_distance(const ExactTable& a, const ExactTable& b, const std::vector<uint32_t>& edges) {
    if (a.edge_count() != b.edge_count())
        throw usage_error("tv_distance: tables do not share an edge index");
    const auto ma = marginal(a, edges);
    const auto mb = marginal(b, edges);
    double s = 0.0;
    for (size_t i = 0; i < ma.size(); ++i) s += std::fabs(ma[i] - mb[i]);
    return 0.5 * s;
}

int bc_distance(const BoundaryCondition& phi, const BoundaryCondition& phi_prime, uint32_t n) {
    const int c_phi = static_cast<int>(phi.class_count(n));
    const int c_psi = static_cast<int>(phi_prime.class_count(n));
    if (phi.refines(phi_prime)) return c_phi - c_psi;
    if (phi_prime.refines(phi)) return c_psi - c_phi;
    const BoundaryCondition joined = BoundaryCondition::join(phi, phi_prime, n);
    const int c_join = static_cast<int>(joined.class_count(n));
    return (c_phi - c_join) + (c_psi - c_join);
}

bool ratio_bound_check(const Graph& g, double p, double q, const BoundaryCondition& phi,
                       const BoundaryCondition& phi_prime) {
    const ExactTable ta = enumerate_rc(g, p, q, phi);
    const ExactTable tb = enumerate_rc(g, p, q, phi_prime);
    const int d = bc_distance(phi, phi_prime, g.n());
    const double bound = std::pow(q, 2.0 * d);
    for (size_t mask = 0; mask < ta.prob.size(); ++mask) {
        const double lo = tb.prob[mask] / bound;
        const double hi = tb.prob[mask] * bound;
        const double x = ta.prob[mask];
        if (x < lo * (1.0 - 1e-9) - 1e-300 || x > hi * (1.0 + 1e-9) + 1e-300) return false;
    }
    return true;
}

// --- transition matrix -------------------------------------------------------

TransitionMatrix transition_matrix(const Graph& g, double p, double q, const BoundaryCondition& bc,
                                   uint32_t max_edges) {
    check_params(p, q);
    const uint32_t m = g.edge_count();
    if (m > max_edges)
        throw size_error("transition_matrix: " + std::to_string(m) + " edges exceeds cap of " +
                         std::to_string(max_edges));
    const double hat_p = p / (q * (1.0 - p) + p);
    TransitionMatrix tm;
    tm.edge_count = m;
    tm.dim = size_t{1} << m;
    tm.rho.resize(tm.dim * m);
    const std::vector<Edge> ghosts = bc.ghost_edges();

#pragma omp parallel
    {
        Uf uf(g.n());
#pragma omp for schedule(static, 512)
        for (int64_t mask = 0; mask < static_cast<int64_t>(tm.dim); ++mask) {
            for (uint32_t e = 0; e < m; ++e) {
                const Edge& ed = g.edge(e);
                bool cut;
                if (ed.u == ed.v) {
                    cut = false;
                } else {
                    // connectivity of the endpoints without e itself
                    uf.reset();
                    const uint64_t rest = static_cast<uint64_t>(mask) & ~(uint64_t{1} << e);
                    for (uint32_t f = 0; f < m; ++f)
                        if ((rest >> f) & 1 && g.edge(f).u != g.edge(f).v)
                            uf.unite(g.edge(f).u, g.edge(f).v);
                    for (const Edge& ge : ghosts) uf.unite(ge.u, ge.v);
                    cut = uf.find(ed.u) != uf.find(ed.v);
                }
                tm.rho[static_cast<size_t>(mask) * m + e] = cut ? hat_p : p;
            }
        }
    }
    return tm;
}

double TransitionMatrix::entry(size_t x, size_t y) const {
    const uint64_t diff = x ^ y;
    if (diff == 0) {
        double stay = 0.0;
        for (uint32_t e = 0; e < edge_count; ++e) {
            const double r = open_prob(x, e);
            stay += ((x >> e) & 1) ? r : (1.0 - r);
        }
        return stay / edge_count;
    }
    if (__builtin_popcountll(diff) != 1) return 0.0;
    const uint32_t e = static_cast<uint32_t>(__builtin_ctzll(diff));
    const double r = open_prob(x, e);
    return (((y >> e) & 1) ? r : (1.0 - r)) / edge_count;
}

std::vector<double> TransitionMatrix::apply(const std::vector<double>& v) const {
    std::vector<double> out(dim, 0.0);
    for (size_t x = 0; x < dim; ++x) {
        double acc = 0.0;
        for (uint32_t e = 0; e < edge_count; ++e) {
            const double r = open_prob(x, e);
            const size_t y_open = x | (size_t{1} << e);
            const size_t y_closed = x & ~(size_t{1} << e);
            acc += r * v[y_open] + (1.0 - r) * v[y_closed];
        }
        out[x] = acc / edge_count;
    }
    return out;
}

std::vector<double> TransitionMatrix::apply_left(const std::vector<double>& v) const {
    std::vector<double> out(dim, 0.0);
    for (size_t x = 0; x < dim; ++x) {
        const double vx = v[x] / edge_count;
        if (vx == 0.0) continue;
        for (uint32_t e = 0; e < edge_count; ++e) {
            const double r = open_prob(x, e);
            out[x | (size_t{1} << e)] += vx * r;
            out[x & ~(size_t{1} << e)] += vx * (1.0 - r);
        }
    }
    return out;
}

namespace {

// Dense symmetrized matrix S = D^(1/2) P D^(-1/2); valid under detailed balance.
Eigen::MatrixXd symmetrized_dense(const TransitionMatrix& tm, const std::vector<double>& pi) {
    const size_t dim = tm.dim;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, dim);
    for (size_t x = 0; x < dim; ++x) {
        for (uint32_t e = 0; e < tm.edge_count; ++e) {
            const double r = tm.open_prob(x, e);
            const size_t y1 = x | (size_t{1} << e);
            const size_t y0 = x & ~(size_t{1} << e);
            s(x, y1) += r / tm.edge_count;
            s(x, y0) += (1.0 - r) / tm.edge_count;
        }
        for (size_t y = 0; y < dim; ++y)
            if (s(x, y) != 0.0 && y != x) s(x, y) *= std::sqrt(pi[x] / pi[y]);
    }
    // enforce exact symmetry against rounding
    s = 0.5 * (s + s.transpose()).eval();
    return s;
}

} // namespace

double spectral_gap(const TransitionMatrix& tm, const ExactTable& table) {
    if (tm.dim != table.prob.size()) throw usage_error("spectral_gap: dimension mismatch");
    if (tm.dim <= 4096) {
        Eigen::MatrixXd s = symmetrized_dense(tm, table.prob);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues(); // ascending
        double second = 0.0;
        for (Eigen::Index i = 0; i < ev.size() - 1; ++i) second = std::max(second, std::fabs(ev[i]));
        return 1.0 - second;
    }
    // power iteration on S with the known top eigenvector sqrt(pi) deflated
    const size_t dim = tm.dim;
    std::vector<double> sqrt_pi(dim);
    for (size_t i = 0; i < dim; ++i) sqrt_pi[i] = std::sqrt(table.prob[i]);
    RandomSource rng(12345);
    std::vector<double> v(dim);
    for (double& x : v) x = rng.u01() - 0.5;
    auto project = [&](std::vector<double>& w) {
        double dot = 0.0;
        for (size_t i = 0; i < dim; ++i) dot += w[i] * sqrt_pi[i];
        for (size_t i = 0; i < dim; ++i) w[i] -= dot * sqrt_pi[i];
    };
    auto apply_s = [&](const std::vector<double>& w) {
        std::vector<double> t(dim);
        for (size_t i = 0; i < dim; ++i) t[i] = w[i] / sqrt_pi[i];
        std::vector<double> pt = tm.apply(t);
        for (size_t i = 0; i < dim; ++i) pt[i] *= sqrt_pi[i];
        return pt;
    };
    project(v);
    double lambda = 0.0;
    for (int it = 0; it < 20000; ++it) {
        std::vector<double> w = apply_s(v);
        project(w);
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-300) return 1.0;
        for (double& x : w) x /= norm;
        double ray = 0.0;
        std::vector<double> sw = apply_s(w);
        for (size_t i = 0; i < dim; ++i) ray += w[i] * sw[i];
        v.swap(w);
        if (it > 50 && std::fabs(std::fabs(ray) - lambda) < 1e-13) {
            lambda = std::fabs(ray);
            break;
        }
        lambda = std::fabs(ray);
    }
    return 1.0 - lambda;
}

std::vector<double> stationary_distribution(const TransitionMatrix& tm) {
    std::vector<double> v(tm.dim, 1.0 / tm.dim);
    for (int it = 0; it < 200000; ++it) {
        std::vector<double> w = tm.apply_left(v);
        double diff = 0.0;
        for (size_t i = 0; i < tm.dim; ++i) diff += std::fabs(w[i] - v[i]);
        v.swap(w);
        if (diff < 1e-14) break;
    }
    return v;
}

// --- log-Sobolev -------------------------------------------------------------

double dirichlet_form(const TransitionMatrix& tm, const ExactTable& table,
                      const std::vector<double>& f) {
    double acc = 0.0;
    for (size_t x = 0; x < tm.dim; ++x) {
        for (uint32_t e = 0; e < tm.edge_count; ++e) {
            const double r = tm.open_prob(x, e);
            const size_t y = x ^ (size_t{1} << e);
            const double pxy = (((y >> e) & 1) ? r : (1.0 - r)) / tm.edge_count;
            const double d = f[x] - f[y];
            acc += table.prob[x] * pxy * d * d;
        }
    }
    return 0.5 * acc;
}

double entropy_of_square(const ExactTable& table, const std::vector<double>& f) {
    double ef2 = 0.0;
    for (size_t x = 0; x < f.size(); ++x) ef2 += table.prob[x] * f[x] * f[x];
    if (ef2 <= 0.0) return 0.0;
    double ent = 0.0;
    for (size_t x = 0; x < f.size(); ++x) {
        const double f2 = f[x] * f[x];
        if (f2 > 0.0) ent += table.prob[x] * f2 * std::log(f2 / ef2);
    }
    return std::max(ent, 0.0);
}

namespace {

double lsi_ratio(const TransitionMatrix& tm, const ExactTable& table,
                 const std::vector<double>& f) {
    const double ent = entropy_of_square(table, f);
    if (ent < 1e-13) return std::numeric_limits<double>::infinity();
    return dirichlet_form(tm, table, f) / ent;
}

// Gradient descent on E(f,f)/Ent(f^2) with backtracking; both pieces have
// closed-form gradients.
double descend(const TransitionMatrix& tm, const ExactTable& table, std::vector<double>& f,
               int iters) {
    const size_t dim = tm.dim;
    double best = lsi_ratio(tm, table, f);
    double step = 0.1;
    for (int it = 0; it < iters; ++it) {
        const double en = dirichlet_form(tm, table, f);
        double ef2 = 0.0;
        for (size_t x = 0; x < dim; ++x) ef2 += table.prob[x] * f[x] * f[x];
        const double ent = entropy_of_square(table, f);
        if (ent < 1e-13 || ef2 <= 0.0) break;

        std::vector<double> grad_e(dim, 0.0);
        for (size_t x = 0; x < dim; ++x) {
            for (uint32_t e = 0; e < tm.edge_count; ++e) {
                const double r = tm.open_prob(x, e);
                const size_t y = x ^ (size_t{1} << e);
                const double pxy = (((y >> e) & 1) ? r : (1.0 - r)) / tm.edge_count;
                grad_e[x] += 2.0 * table.prob[x] * pxy * (f[x] - f[y]);
            }
        }
        std::vector<double> grad(dim);
        for (size_t x = 0; x < dim; ++x) {
            const double f2 = f[x] * f[x];
            const double glog = (f2 > 0.0) ? 2.0 * table.prob[x] * f[x] * std::log(f2 / ef2) : 0.0;
            grad[x] = (grad_e[x] * ent - en * glog) / (ent * ent);
        }
        double gnorm = 0.0;
        for (double gx : grad) gnorm += gx * gx;
        gnorm = std::sqrt(gnorm);
        if (gnorm < 1e-14) break;

        bool improved = false;
        for (int bt = 0; bt < 24; ++bt) {
            std::vector<double> cand(dim);
            for (size_t x = 0; x < dim; ++x) cand[x] = f[x] - step * grad[x] / gnorm;
            const double r = lsi_ratio(tm, table, cand);
            if (r < best) {
                best = r;
                f.swap(cand);
                improved = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if (!improved && step < 1e-12) break;
    }
    return best;
}

} // namespace

LsiEstimate log_sobolev_estimate(const TransitionMatrix& tm, const ExactTable& table, int trials,
                                 uint64_t seed) {
    if (tm.dim < 2) throw usage_error("log_sobolev_estimate: chain has a single state");
    RandomSource rng(seed);
    LsiEstimate best;
    best.alpha = std::numeric_limits<double>::infinity();

    auto consider = [&](std::vector<double> f, int iters) {
        const double r0 = lsi_ratio(tm, table, f);
        if (!std::isfinite(r0)) return;
        const double r = descend(tm, table, f, iters);
        if (r < best.alpha) {
            best.alpha = r;
            best.f = std::move(f);
        }
    };

    // structured starts: dictator functions and single-state indicators
    for (uint32_t e = 0; e < tm.edge_count; ++e) {
        std::vector<double> f(tm.dim);
        for (size_t x = 0; x < tm.dim; ++x) f[x] = (x >> e) & 1 ? 1.0 : 2.0;
        consider(std::move(f), 200);
    }
    {
        const size_t xmin = std::min_element(table.prob.begin(), table.prob.end()) -
                            table.prob.begin();
        std::vector<double> f(tm.dim, 0.0);
        f[xmin] = 1.0;
        consider(std::move(f), 200);
    }

    for (int t = 0; t < trials; ++t) {
        std::vector<double> f(tm.dim);
        if (t % 2 == 0) {
            for (double& x : f) x = rng.u01();
        } else {
            for (double& x : f) x = rng.u01() < 0.5 ? 0.25 : 1.0;
        }
        consider(std::move(f), 120);
    }
    return best;
}

void export_table(const ExactTable& t, std::ostream& os) {
    for (size_t mask = 0; mask < t.prob.size(); ++mask) {
        os << mask << ',';
        const auto old = os.precision(17);
        os << t.prob[mask] << '\n';
        os.precision(old);
    }
}

} // namespace rc
