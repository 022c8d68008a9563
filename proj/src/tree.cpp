#include "rc/tree.hpp"

#include <cmath>
#include <ostream>

#include "rc/errors.hpp"

namespace rc {

double hat_p(double p, double q) {
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("hat_p: p must lie in (0,1)");
    if (!(q > 0.0)) throw parameter_error("hat_p: q must be positive");
    return p / (q * (1.0 - p) + p);
}

TreeParams TreeParams::make(double p, double q, uint32_t delta) {
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("TreeParams: p must lie in (0,1)");
    if (!(q > 0.0)) throw parameter_error("TreeParams: q must be positive");
    if (delta < 2) throw parameter_error("TreeParams: delta must be at least 2");
    TreeParams tp;
    tp.p = p;
    tp.q = q;
    tp.delta = delta;
    tp.d = delta - 1;
    tp.mu = p / q + 1.0 - p;
    return tp;
}

namespace {

// f with an arbitrary exponent; shared by the d-ary recursion and the final
// delta-branch map at the root. Written so the numerator difference of d-th
// powers never cancels catastrophically:
//   (mu+ax)^k - (mu-bx)^k = mu^k e^{s2} expm1(s1-s2),
// with s1 = k log1p(ax/mu), s2 = k log1p(-bx/mu).
double f_pow(double x, const TreeParams& tp, uint32_t k) {
    const double a = tp.p * (1.0 - 1.0 / tp.q);
    const double b = tp.p / tp.q;
    const double s1 = k * std::log1p(a * x / tp.mu);
    const double s2 = k * std::log1p(-b * x / tp.mu);
    const double numer = std::exp(s2) * std::expm1(s1 - s2);
    const double denom = std::exp(s1) + (tp.q - 1.0) * std::exp(s2);
    return numer / denom;
}

// log f(e^y) for very negative y, where f(x) ~ d*hat_p*x.
double log_f_of_exp(double y, const TreeParams& tp) {
    const double x = std::exp(y);
    if (x > 1e-15) return std::log(f_pow(x, tp, tp.d));
    return y + std::log(tp.d * hat_p(tp.p, tp.q));
}

} // namespace

double f_recursion(double x, const TreeParams& params) {
    if (x < 0.0 || x > 1.0) throw usage_error("f_recursion: x outside [0,1]");
    if (x == 0.0) return 0.0;
    return f_pow(x, params, params.d);
}

double phi(uint32_t h, const TreeParams& params) {
    double x = 1.0;
    for (uint32_t i = 0; i < h; ++i) x = f_recursion(x, params);
    return x;
}

double phi_root(uint32_t h, const TreeParams& params) {
    if (h == 0) return 1.0;
    return f_pow(phi(h - 1, params), params, params.delta);
}

double decay_rate(const TreeParams& params, uint32_t h) {
    double x = 1.0;
    uint32_t i = 0;
    for (; i < h; ++i) {
        const double next = f_recursion(x, params);
        if (next < 1e-12) {
            // switch to log-space iteration for the remaining depth
            double y = std::log(next);
            for (uint32_t j = i + 1; j < h; ++j) y = log_f_of_exp(y, params);
            return std::exp(log_f_of_exp(y, params) - y);
        }
        x = next;
    }
    return f_recursion(x, params) / x;
}

namespace {

// Survival predicate: does f admit a positive fixed point? Detected through
// the slope at zero (exact in the continuous-transition regime) together with
// a grid-plus-golden-section search for f(x) > x (the first-order regime,
// where the fixed point appears at macroscopic height).
bool survives(double p, double q, uint32_t delta, const PuOptions& opts) {
    const TreeParams tp = TreeParams::make(p, q, delta);
    if (tp.d * hat_p(p, q) >= 1.0) return true;
    auto g = [&](double x) { return f_recursion(x, tp) - x; };
    double best_x = 0.0, best_g = -1.0;
    for (uint32_t i = 1; i <= opts.grid; ++i) {
        const double x = static_cast<double>(i) / opts.grid;
        const double v = g(x);
        if (v > 0.0) return true;
        if (v > best_g) {
            best_g = v;
            best_x = x;
        }
    }
    // golden-section refinement of the max around the best grid point
    double lo = std::max(0.0, best_x - 1.0 / opts.grid);
    double hi = std::min(1.0, best_x + 1.0 / opts.grid);
    const double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double g1 = g(x1), g2 = g(x2);
    for (uint32_t i = 0; i < opts.refine; ++i) {
        if (g1 < g2) {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + gr * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - gr * (hi - lo);
            g1 = g(x1);
        }
        if (std::max(g1, g2) > 0.0) return true;
    }
    return false;
}

} // namespace

double p_u(double q, uint32_t delta, const PuOptions& opts) {
    if (q < 1.0) throw parameter_error("p_u: requires q >= 1");
    if (delta < 3) throw parameter_error("p_u: requires delta >= 3");
    if (!(opts.tol > 0.0)) throw parameter_error("p_u: tol must be positive");
    double lo = 1e-9, hi = 1.0 - 1e-9;
    if (survives(lo, q, delta, opts) || !survives(hi, q, delta, opts))
        throw bracket_error("p_u: survival predicate does not bracket a threshold");
    while (hi - lo > opts.tol) {
        const double mid = 0.5 * (lo + hi);
        if (survives(mid, q, delta, opts))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double p_u(double q, uint32_t delta, double tol) {
    PuOptions opts;
    opts.tol = tol;
    return p_u(q, delta, opts);
}

namespace {

CompleteTree build_tree_impl(uint32_t delta, uint32_t h, TreeBc tag, uint32_t root_children) {
    if (delta < 3) throw parameter_error("build tree: delta must be at least 3");
    if (h < 1) throw parameter_error("build tree: height must be at least 1");
    CompleteTree t;
    t.delta = delta;
    t.height = h;
    t.root = 0;
    t.tag = tag;
    std::vector<Edge> edges;
    std::vector<uint32_t> frontier{0};
    t.depth.push_back(0);
    uint32_t next_id = 1;
    for (uint32_t level = 1; level <= h; ++level) {
        std::vector<uint32_t> next;
        for (uint32_t v : frontier) {
            const uint32_t kids = (v == 0) ? root_children : delta - 1;
            for (uint32_t c = 0; c < kids; ++c) {
                edges.push_back({v, next_id});
                t.depth.push_back(level);
                next.push_back(next_id);
                ++next_id;
            }
        }
        frontier.swap(next);
    }
    t.leaves = frontier;
    t.graph = Graph(next_id, std::move(edges));
    if (tag == TreeBc::wired) {
        t.bc = BoundaryCondition::wired(t.leaves);
    } else if (tag == TreeBc::wired_with_root) {
        std::vector<uint32_t> cls = t.leaves;
        cls.push_back(t.root);
        t.bc = BoundaryCondition::wired(cls);
    }
    return t;
}

} // namespace

CompleteTree build_complete_tree(uint32_t delta, uint32_t h, TreeBc tag) {
    return build_tree_impl(delta, h, tag, delta);
}

CompleteTree build_dary_tree(uint32_t delta, uint32_t h, TreeBc tag) {
    return build_tree_impl(delta, h, tag, delta - 1);
}

void export_threshold_table(std::ostream& os, const std::vector<double>& qs, uint32_t delta,
                            double tol) {
    os << "q,delta,p_u,hat_p_at_p_u,d_hat_p\n";
    const auto old = os.precision(10);
    for (double q : qs) {
        const double pu = p_u(q, delta, tol);
        const double hp = hat_p(pu, q);
        os << q << ',' << delta << ',' << pu << ',' << hp << ',' << (delta - 1) * hp << '\n';
    }
    os.precision(old);
}

} // namespace rc
