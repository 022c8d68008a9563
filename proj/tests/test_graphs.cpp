#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "rc/errors.hpp"
#include "rc/multigraph.hpp"
#include "rc/stats.hpp"

using namespace rc;

TEST_CASE("sample_cm forced edge counts") {
    // |edges| = delta*n/2 regardless of the matching
    CHECK(sample_cm(2, 3, 0).edge_count() == 3);
    CHECK(sample_cm(2, 3, 99).edge_count() == 3);

    // n=1, delta=2: the only matching is the self-loop
    const MultiGraph g = sample_cm(1, 2, 5);
    CHECK(g.edge_count() == 1);
    CHECK(g.graph().edge(0).u == 0);
    CHECK(g.graph().edge(0).v == 0);

    CHECK_THROWS_AS(sample_cm(3, 3, 0), config_error); // odd half-edge count
}

TEST_CASE("degree invariant across seeds") {
    for (uint64_t seed = 0; seed < 25; ++seed) {
        const MultiGraph g = sample_cm(40, 3, seed);
        for (uint32_t v = 0; v < g.n(); ++v) CHECK(g.graph().degree(v) == 3);
    }
}

TEST_CASE("fraction of simple outcomes near exp(-2) for delta=3") {
    // Monte Carlo estimate of P(simple); the limit for delta=3 is
    // exp(-lambda - lambda^2) with lambda = (delta-1)/2 = 1, i.e. 0.1353.
    int simple = 0;
    const int trials = 10000;
    for (int s = 0; s < trials; ++s) simple += sample_cm(100, 3, s).is_simple();
    const double frac = double(simple) / trials;
    CHECK(frac == doctest::Approx(0.135).epsilon(0.15)); // +-0.02 band
    CHECK(std::fabs(frac - 0.135) < 0.02);
}

TEST_CASE("sample_simple on 4 vertices gives K4") {
    for (uint64_t seed = 0; seed < 10; ++seed) {
        const MultiGraph g = sample_simple(4, 3, seed);
        CHECK(g.is_simple());
        std::set<std::pair<uint32_t, uint32_t>> pairs;
        for (const Edge& e : g.graph().edges())
            pairs.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
        CHECK(pairs.size() == 6); // all pairs of 4 vertices
    }
}

TEST_CASE("sample_simple exhausts retries when no simple graph exists") {
    try {
        sample_simple(2, 3, 1, 50);
        FAIL("expected retry_exhausted");
    } catch (const retry_exhausted& e) {
        CHECK(e.attempts == 50);
    }
}

TEST_CASE("mean attempts to reach a simple graph") {
    // reproduces the sub-seed scheme of sample_simple and counts attempts
    std::vector<double> attempts;
    for (uint64_t seed = 0; seed < 800; ++seed) {
        int k = 0;
        while (!sample_cm(100, 3, mix_seed(seed, k)).is_simple()) ++k;
        attempts.push_back(k + 1.0);
    }
    CHECK(std::fabs(mean(attempts) - 7.4) < 1.0);
}

TEST_CASE("reveal_next forced self-loop") {
    RevealCursor cur(1, 2, 3);
    const HalfEdgePair pr = cur.reveal_next(0);
    CHECK(pr.first == 0);
    CHECK(pr.second == 1);
    CHECK_THROWS_AS(cur.reveal_next(0), usage_error);
}

TEST_CASE("reveal_next partner is uniform over the free half-edges") {
    // 4 free half-edges, fixed target: the partner must be uniform over the
    // other 3 (chi-squared over 10^4 trials)
    std::vector<double> counts(4, 0.0);
    const int trials = 10000;
    for (int s = 0; s < trials; ++s) {
        RevealCursor cur(2, 2, s);
        cur.reveal_next(0);
        counts[cur.partner(0)] += 1.0;
    }
    const std::vector<double> expected{0.0, trials / 3.0, trials / 3.0, trials / 3.0};
    double stat = 0.0;
    for (int i = 1; i < 4; ++i)
        stat += (counts[i] - expected[i]) * (counts[i] - expected[i]) / expected[i];
    CHECK(chi2_sf(stat, 2) > 0.01);
}

TEST_CASE("canonical reveal order reproduces sample_cm") {
    const uint64_t seed = 77;
    RevealCursor cur(30, 3, seed);
    while (!cur.complete()) cur.reveal_next(cur.first_free());
    const MultiGraph a = cur.finish();
    const MultiGraph b = sample_cm(30, 3, seed);
    CHECK(a.pairs() == b.pairs());
}

TEST_CASE("ball on the 5-cycle") {
    const Graph g = make_cycle(5);
    const Ball b = ball(g, 0, 1);
    CHECK(b.vertices.size() == 3);
    CHECK(b.edge_ids.size() == 2);

    const Ball whole = ball(g, 0, 10); // radius beyond the diameter
    CHECK(whole.vertices.size() == 5);
    CHECK(whole.edge_ids.size() == 5);
    CHECK(whole.boundary.empty());
}

TEST_CASE("ball size respects the degree bound") {
    const MultiGraph mg = sample_simple(1000, 3, 4);
    for (uint32_t v = 0; v < 20; ++v) {
        const Ball b = ball(mg.graph(), v, 3);
        CHECK(b.vertices.size() <= 1 + 3 * (1 + 2 + 4));
    }
}

TEST_CASE("ball_out") {
    const Graph path = make_path(3); // a-b-c
    SUBCASE("empty exclusion equals ball") {
        const MultiGraph mg = sample_simple(64, 3, 9);
        for (uint32_t v = 0; v < 8; ++v) {
            const Ball plain = ball(mg.graph(), v, 2);
            const Ball same = ball_out(mg.graph(), v, 2, {});
            CHECK(plain.vertices == same.vertices);
            CHECK(plain.edge_ids == same.edge_ids);
        }
    }
    SUBCASE("all incident edges excluded leaves only the center") {
        std::vector<uint32_t> all{0, 1};
        const Ball b = ball_out(path, 1, 2, all);
        CHECK(b.vertices == std::vector<uint32_t>{1});
        CHECK(b.edge_ids.empty());
    }
    SUBCASE("one incident edge excluded") {
        const Ball b = ball_out(path, 1, 1, {0}); // drop edge a-b at v=b
        CHECK(b.vertices == std::vector<uint32_t>{1, 2});
        CHECK(b.edge_ids == std::vector<uint32_t>{1});
    }
}

TEST_CASE("tree_excess") {
    const Graph tree = make_path(6);
    CHECK(tree_excess(tree, ball(tree, 0, 10)) == 0);
    const Graph cyc = make_cycle(7);
    CHECK(tree_excess(cyc, ball(cyc, 0, 10)) == 1);
}

TEST_CASE("tree_excess is relabeling invariant") {
    const MultiGraph mg = sample_cm(24, 3, 12);
    const Graph& g = mg.graph();
    const uint32_t base = tree_excess(g, ball(g, 0, 2));
    // relabel by reversing vertex ids
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) edges.push_back({g.n() - 1 - e.u, g.n() - 1 - e.v});
    const Graph h(g.n(), edges);
    CHECK(tree_excess(h, ball(h, g.n() - 1, 2)) == base);
}

TEST_CASE("random 3-regular graphs are treelike at scale") {
    // R = (1/2 - 0.1) log_2 n with n = 2^12 gives R = 4; L = 5 holds on
    // nearly every seed
    int ok = 0;
    const int seeds = 50;
    for (int s = 0; s < seeds; ++s) {
        const MultiGraph mg = sample_simple(1 << 12, 3, 1000 + s);
        ok += is_lr_treelike(mg.graph(), 5, 4);
    }
    CHECK(ok >= seeds - 1);
}

TEST_CASE("parallel and serial treelike scans agree") {
    const MultiGraph mg = sample_simple(512, 3, 2);
    for (uint32_t L : {0u, 1u, 3u})
        CHECK(is_lr_treelike(mg.graph(), L, 3) == is_lr_treelike_serial(mg.graph(), L, 3));
}

TEST_CASE("graph file round-trip is bit-exact") {
    const MultiGraph g = sample_cm(20, 3, 31);
    std::ostringstream os1;
    g.save(os1);
    std::istringstream is(os1.str());
    const MultiGraph h = MultiGraph::load(is);
    CHECK(h.pairs() == g.pairs());
    std::ostringstream os2;
    h.save(os2);
    CHECK(os1.str() == os2.str());
}
