#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rc/dynamics.hpp"
#include "rc/errors.hpp"
#include "rc/exact.hpp"
#include "rc/tree.hpp"

using namespace rc;

namespace {

// independent leaf-connectivity evaluation over an exact table
double root_to_boundary_probability(const CompleteTree& t, const ExactTable& table) {
    double acc = 0.0;
    for (size_t mask = 0; mask < table.prob.size(); ++mask) {
        std::vector<uint32_t> parent(t.graph.n());
        for (uint32_t i = 0; i < parent.size(); ++i) parent[i] = i;
        auto find = [&](uint32_t x) {
            while (parent[x] != x) {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            return x;
        };
        for (uint32_t e = 0; e < t.graph.edge_count(); ++e)
            if ((mask >> e) & 1) {
                const uint32_t a = find(t.graph.edge(e).u), b = find(t.graph.edge(e).v);
                if (a != b) parent[a] = b;
            }
        const uint32_t r = find(t.root);
        for (uint32_t l : t.leaves)
            if (find(l) == r) {
                acc += table.prob[mask];
                break;
            }
    }
    return acc;
}

} // namespace

TEST_CASE("hat_p") {
    CHECK(hat_p(0.37, 1.0) == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(hat_p(0.5, 2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(hat_p(2.0 / 3.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(hat_p(0.0, 2.0), parameter_error);
    CHECK_THROWS_AS(hat_p(1.0, 2.0), parameter_error);
}

TEST_CASE("f_recursion basics") {
    const TreeParams tp = TreeParams::make(0.4, 1.0, 3);
    CHECK(f_recursion(0.0, tp) == 0.0);
    // q=1 reduction: f(x) = 1 - (1 - p x)^d
    CHECK(f_recursion(0.5, tp) == doctest::Approx(0.36).epsilon(1e-12));

    // slope at zero is d * hat_p
    const TreeParams tp2 = TreeParams::make(0.5, 2.0, 3);
    const double h = 1e-7;
    const double slope = (f_recursion(h, tp2) - f_recursion(0.0, tp2)) / h;
    CHECK(slope == doctest::Approx(2.0 * hat_p(0.5, 2.0)).epsilon(1e-6));
}

TEST_CASE("f is increasing on [0,1] for q >= 1") {
    for (double q : {1.0, 1.5, 2.0, 3.0, 10.0}) {
        for (double p : {0.2, 0.5, 0.8}) {
            const TreeParams tp = TreeParams::make(p, q, 4);
            double prev = 0.0;
            for (int i = 1; i <= 200; ++i) {
                const double x = i / 200.0;
                const double fx = f_recursion(x, tp);
                CHECK(fx >= prev - 1e-14);
                prev = fx;
            }
        }
    }
}

TEST_CASE("phi iterates") {
    const TreeParams tp = TreeParams::make(0.5, 2.0, 3);
    CHECK(phi(0, tp) == 1.0);

    SUBCASE("q=1 percolation fixed points as the oracle") {
        // independent iteration of the classical map 1 - (1 - p x)^d
        auto perc_limit = [](double p, int d) {
            double x = 1.0;
            for (int i = 0; i < 20000; ++i) x = 1.0 - std::pow(1.0 - p * x, d);
            return x;
        };
        const TreeParams sub = TreeParams::make(0.3, 1.0, 3); // p < 1/d
        CHECK(phi(4000, sub) < 1e-10);
        const TreeParams sup = TreeParams::make(0.7, 1.0, 3); // p > 1/d
        CHECK(phi(4000, sup) == doctest::Approx(perc_limit(0.7, 2)).epsilon(1e-9));
    }

    SUBCASE("decay ratio approaches d hat_p = 2/3") {
        const double target = 2.0 * hat_p(0.5, 2.0);
        CHECK(decay_rate(tp, 60) == doctest::Approx(target).epsilon(0.01));
        CHECK(phi(61, tp) / phi(60, tp) == doctest::Approx(target).epsilon(0.01));
    }
}

TEST_CASE("decay_rate in the log-space regime") {
    const TreeParams tp = TreeParams::make(0.2, 1.5, 4);
    const double target = 3.0 * hat_p(0.2, 1.5);
    CHECK(decay_rate(tp, 80) == doctest::Approx(target).epsilon(0.01));
    // deep in the underflow region the ratio stays put
    CHECK(decay_rate(tp, 5000) == doctest::Approx(target).epsilon(0.01));
}

TEST_CASE("uniqueness thresholds") {
    CHECK(p_u(1.0, 3, 1e-7) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(p_u(1.0, 4, 1e-7) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    CHECK(p_u(2.0, 3, 1e-7) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK_THROWS_AS(p_u(0.5, 3, 1e-7), parameter_error);
}

TEST_CASE("d hat_p pins the threshold for q <= 2 and stays below 1 under it") {
    for (double q : {1.0, 1.5, 2.0}) {
        const double pu = p_u(q, 3, 1e-8);
        CHECK(std::fabs(2.0 * hat_p(pu, q) - 1.0) < 1e-5);
    }
    for (double q : {3.0, 10.0}) {
        const double pu = p_u(q, 3, 1e-8);
        for (int i = 1; i <= 100; ++i) {
            const double p = pu * i / 101.0;
            CHECK(2.0 * hat_p(p, q) < 1.0);
        }
    }
}

TEST_CASE("complete tree construction") {
    const CompleteTree t1 = build_complete_tree(3, 1, TreeBc::free_bc);
    CHECK(t1.graph.n() == 4);
    CHECK(t1.graph.edge_count() == 3);
    CHECK(t1.leaves.size() == 3);

    const CompleteTree t2 = build_complete_tree(3, 2, TreeBc::wired);
    CHECK(t2.leaves.size() == 6); // delta * d^(h-1)
    CHECK(t2.graph.edge_count() == 9);
    CHECK(t2.graph.degree(t2.root) == 3);
    for (uint32_t v = 0; v < t2.graph.n(); ++v)
        if (v != t2.root && t2.depth[v] < t2.height) CHECK(t2.graph.degree(v) == 3);
    CHECK(t2.bc.classes().size() == 1);
    CHECK(t2.bc.classes()[0].size() == 6);

    const CompleteTree t3 = build_complete_tree(3, 2, TreeBc::wired_with_root);
    CHECK(t3.bc.classes()[0].size() == 7); // leaves plus the root
}

TEST_CASE("wired-tree enumeration validates the recursion at h = 2") {
    const double p = 0.5, q = 2.0;
    const TreeParams tp = TreeParams::make(p, q, 3);

    // the recursion walks the tree whose root has d children
    const CompleteTree dary = build_dary_tree(3, 2, TreeBc::wired);
    const ExactTable t_dary = enumerate_rc(dary.graph, p, q, dary.bc);
    CHECK(root_to_boundary_probability(dary, t_dary) == doctest::Approx(phi(2, tp)).epsilon(1e-10));

    // the delta-rooted complete tree applies one final delta-branch map
    const CompleteTree full = build_complete_tree(3, 2, TreeBc::wired);
    const ExactTable t_full = enumerate_rc(full.graph, p, q, full.bc);
    CHECK(root_to_boundary_probability(full, t_full) ==
          doctest::Approx(phi_root(2, tp)).epsilon(1e-10));
}

TEST_CASE("root-to-leaf connectivity under the root-wired measure decays like hat_p^h") {
    const double p = 0.5, q = 2.0;
    const double hp = hat_p(p, q);

    auto leaf_probability_exact = [&](uint32_t h) {
        const CompleteTree t = build_complete_tree(3, h, TreeBc::wired_with_root);
        const ExactTable table = enumerate_rc(t.graph, p, q, t.bc);
        const uint32_t leaf = t.leaves.front();
        double acc = 0.0;
        for (size_t mask = 0; mask < table.prob.size(); ++mask) {
            std::vector<uint32_t> parent(t.graph.n());
            for (uint32_t i = 0; i < parent.size(); ++i) parent[i] = i;
            auto find = [&](uint32_t x) {
                while (parent[x] != x) {
                    parent[x] = parent[parent[x]];
                    x = parent[x];
                }
                return x;
            };
            for (uint32_t e = 0; e < t.graph.edge_count(); ++e)
                if ((mask >> e) & 1) {
                    const uint32_t a = find(t.graph.edge(e).u), b = find(t.graph.edge(e).v);
                    if (a != b) parent[a] = b;
                }
            if (find(leaf) == find(t.root)) acc += table.prob[mask];
        }
        return acc;
    };

    auto open_path_root_to_leaf = [](const CompleteTree& t, const std::vector<uint8_t>& omega,
                                     uint32_t leaf) {
        // connectivity in omega alone, without the boundary identifications
        std::vector<uint8_t> seen(t.graph.n(), 0);
        std::vector<uint32_t> queue{t.root};
        seen[t.root] = 1;
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            const uint32_t v = queue[qi];
            if (v == leaf) return true;
            for (uint32_t e : t.graph.incident(v)) {
                if (!omega[e]) continue;
                const uint32_t w = t.graph.other_endpoint(e, v);
                if (!seen[w]) {
                    seen[w] = 1;
                    queue.push_back(w);
                }
            }
        }
        return false;
    };

    auto leaf_probability_mcmc = [&](uint32_t h, uint64_t samples) {
        const CompleteTree t = build_complete_tree(3, h, TreeBc::wired_with_root);
        ChainState chain(t.graph, p, q, t.bc, true, DynConnState::Backend::naive);
        UpdateStream stream(1234 + h, t.graph.edge_count());
        const uint32_t m = t.graph.edge_count();
        chain.run(60 * m, stream); // burn
        const uint32_t leaf = t.leaves.front();
        uint64_t hits = 0;
        for (uint64_t i = 0; i < samples; ++i) {
            chain.run(m, stream);
            if (open_path_root_to_leaf(t, chain.config(), leaf)) ++hits;
        }
        return double(hits) / samples;
    };

    // the normalized ratios theta_h / hat_p^h stay within one stable band
    std::vector<double> c_values;
    c_values.push_back(leaf_probability_exact(1) / hp);
    c_values.push_back(leaf_probability_exact(2) / (hp * hp));
    c_values.push_back(leaf_probability_mcmc(3, 60000) / (hp * hp * hp));
    c_values.push_back(leaf_probability_mcmc(4, 60000) / (hp * hp * hp * hp));
    c_values.push_back(leaf_probability_mcmc(5, 60000) / (hp * hp * hp * hp * hp));
    for (double c : c_values) {
        CHECK(c > 0.3);
        CHECK(c < 4.0);
    }
    // adjacent ratios stay put: no residual exponential trend
    for (size_t i = 0; i + 1 < c_values.size(); ++i)
        CHECK(c_values[i + 1] / c_values[i] == doctest::Approx(1.0).epsilon(0.5));
}

TEST_CASE("threshold table export") {
    std::ostringstream os;
    export_threshold_table(os, {1.0, 2.0}, 3, 1e-6);
    std::string header;
    std::istringstream is(os.str());
    std::getline(is, header);
    CHECK(header == "q,delta,p_u,hat_p_at_p_u,d_hat_p");
    int rows = 0;
    std::string line;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 2);
}
