#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rc/connectivity.hpp"
#include "rc/errors.hpp"
#include "rc/multigraph.hpp"
#include "rc/rng.hpp"

using namespace rc;

TEST_CASE("component counts on a path") {
    const Graph g = make_path(3);
    for (auto be : {DynConnState::Backend::naive, DynConnState::Backend::forest}) {
        DynConnState st(g, BoundaryCondition::free(), be);
        CHECK(st.component_count() == 3);
        st.toggle(0, true);
        st.toggle(1, true);
        CHECK(st.component_count() == 1);
        CHECK(st.connected(0, 2));
    }
}

TEST_CASE("ghost wirings merge components") {
    // n=4, no edges open, one wiring class {0,1}
    const Graph g(4, {{0, 1}, {1, 2}, {2, 3}});
    for (auto be : {DynConnState::Backend::naive, DynConnState::Backend::forest}) {
        DynConnState st(g, BoundaryCondition::wired({0, 1}), be);
        CHECK(st.component_count() == 3);
        CHECK(st.connected(0, 1));
        CHECK_FALSE(st.connected(0, 2));
    }
}

TEST_CASE("wiring provides an alternative path for connected queries") {
    // triangle, only edge 0-1 open, wiring {1,2}: 0 and 2 are connected
    const Graph g = make_triangle();
    for (auto be : {DynConnState::Backend::naive, DynConnState::Backend::forest}) {
        DynConnState st(g, BoundaryCondition::wired({1, 2}), be);
        st.toggle(0, true);
        CHECK(st.connected(0, 2));
        CHECK(st.connected(0, 0));
    }
}

TEST_CASE("toggles are idempotent and involutive") {
    const Graph g = make_k4_minus_edge();
    for (auto be : {DynConnState::Backend::naive, DynConnState::Backend::forest}) {
        DynConnState st(g, BoundaryCondition::free(), be);
        st.toggle(2, true);
        st.toggle(2, true);
        CHECK(st.open(2));
        CHECK(st.open_count() == 1);
        const size_t comps = st.component_count();
        st.toggle(3, true);
        st.toggle(3, false);
        CHECK(st.component_count() == comps);
    }
}

TEST_CASE("cut-edge basics") {
    for (auto be : {DynConnState::Backend::naive, DynConnState::Backend::forest}) {
        SUBCASE("path bridge") {
            const Graph g = make_path(3);
            DynConnState st(g, BoundaryCondition::free(), be);
            st.toggle(0, true);
            st.toggle(1, true);
            CHECK(st.is_cut_edge(0));
            CHECK(st.is_cut_edge(1));
        }
        SUBCASE("triangle has no cut edges when full") {
            const Graph g = make_triangle();
            DynConnState st(g, BoundaryCondition::free(), be);
            for (uint32_t e = 0; e < 3; ++e) st.toggle(e, true);
            for (uint32_t e = 0; e < 3; ++e) CHECK_FALSE(st.is_cut_edge(e));
        }
        SUBCASE("parallel copies and self-loops") {
            const Graph g = make_doubled_edge_with_loop();
            DynConnState st(g, BoundaryCondition::free(), be);
            st.toggle(0, true);
            st.toggle(1, true);
            CHECK_FALSE(st.is_cut_edge(0)); // the parallel copy is an alternative path
            CHECK_FALSE(st.is_cut_edge(1));
            st.toggle(1, false);
            CHECK(st.is_cut_edge(0));
            CHECK_FALSE(st.is_cut_edge(3)); // self-loops are never cut-edges
            // and the answer does not depend on the edge's own state
            st.toggle(0, false);
            CHECK(st.is_cut_edge(0));
        }
    }
}

TEST_CASE("forest backend equals the oracle on random workloads") {
    // randomized toggles and queries on a configuration-model multigraph;
    // every answer must match the BFS/union-find oracle
    const MultiGraph mg = sample_cm(200, 3, 5);
    const Graph& g = mg.graph();
    BoundaryCondition bc;
    bc.add_class({0, 1, 2});
    bc.add_class({10, 20});
    DynConnState oracle(g, bc, DynConnState::Backend::naive);
    DynConnState forest(g, bc, DynConnState::Backend::forest);
    RandomSource rng(99);
    for (int step = 0; step < 20000; ++step) {
        const uint32_t e = rng.below32(g.edge_count());
        const int what = static_cast<int>(rng.below(4));
        if (what == 0) {
            const bool v = rng.u01() < 0.5;
            oracle.toggle(e, v);
            forest.toggle(e, v);
        } else if (what == 1) {
            const uint32_t u = rng.below32(g.n()), v = rng.below32(g.n());
            CHECK(oracle.connected(u, v) == forest.connected(u, v));
        } else if (what == 2) {
            CHECK(oracle.component_count() == forest.component_count());
        } else {
            CHECK(oracle.is_cut_edge(e) == forest.is_cut_edge(e));
        }
    }
}

TEST_CASE("component count moves by at most one per toggle") {
    const MultiGraph mg = sample_cm(64, 3, 8);
    DynConnState st(mg.graph(), BoundaryCondition::free(), DynConnState::Backend::forest);
    RandomSource rng(4);
    size_t prev = st.component_count();
    for (int i = 0; i < 3000; ++i) {
        const uint32_t e = rng.below32(mg.edge_count());
        const bool v = rng.u01() < 0.5;
        const bool cut = st.is_cut_edge(e);
        const bool was = st.open(e);
        st.toggle(e, v);
        const size_t now = st.component_count();
        CHECK(std::llabs(int64_t(now) - int64_t(prev)) <= 1);
        // cut-edge criterion: opening from closed drops the count by one
        if (!was && v) CHECK(prev - now == (cut ? 1 : 0));
        prev = now;
    }
}

TEST_CASE("edge id range is checked") {
    const Graph g = make_triangle();
    DynConnState st(g, BoundaryCondition::free());
    CHECK_THROWS_AS(st.toggle(3, true), usage_error);
    CHECK_THROWS_AS(Graph(2, {{0, 5}}), usage_error);
}
