#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rc/dynamics.hpp"
#include "rc/errors.hpp"
#include "rc/exact.hpp"
#include "rc/multigraph.hpp"
#include "rc/stats.hpp"
#include "rc/tree.hpp"

using namespace rc;

TEST_CASE("update stream replay and laws") {
    UpdateStream a(42, 10), b(42, 10);
    for (int i = 0; i < 1000; ++i) {
        const auto ua = a.next();
        const auto ub = b.next();
        CHECK(ua.edge == ub.edge);
        CHECK(ua.u == ub.u);
    }
    CHECK(a.position() == 1000);

    // uniformity of the edge index
    UpdateStream s(7, 8);
    std::vector<double> counts(8, 0.0);
    double usum = 0.0;
    const int trials = 80000;
    for (int i = 0; i < trials; ++i) {
        const auto up = s.next();
        counts[up.edge] += 1.0;
        usum += up.u;
    }
    const std::vector<double> expected(8, trials / 8.0);
    CHECK(chi2_sf(chi2_stat(counts, expected), 7) > 0.01);
    CHECK(usum / trials == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("fk_step thresholds") {
    const double p = 0.5, q = 2.0;
    const double hp = hat_p(p, q); // 1/3
    SUBCASE("u = 0 always opens") {
        ChainState chain(make_single_edge(), p, q, BoundaryCondition::free(), false);
        chain.fk_step(0, 0.0);
        CHECK(chain.open(0));
    }
    SUBCASE("between hat_p and p: cut-edge closes, non-cut opens") {
        const double u = 0.5 * (hp + p);
        // triangle with the two other edges open: edge 2 is not a cut-edge
        std::vector<uint8_t> two_open{1, 1, 0};
        ChainState a(make_triangle(), p, q, BoundaryCondition::free(), two_open);
        a.fk_step(2, u);
        CHECK(a.open(2));
        // with the others closed it is a cut-edge and stays shut
        ChainState b(make_triangle(), p, q, BoundaryCondition::free(), false);
        b.fk_step(2, u);
        CHECK_FALSE(b.open(2));
    }
    SUBCASE("q=1 collapses both thresholds to p") {
        ChainState a(make_triangle(), 0.4, 1.0, BoundaryCondition::free(), true);
        ChainState b(make_triangle(), 0.4, 1.0, BoundaryCondition::free(), false);
        UpdateStream s(3, 3);
        for (int i = 0; i < 50; ++i) {
            const auto [e, u] = s.next();
            a.fk_step(e, u);
            b.fk_step(e, u);
            CHECK(a.open(e) == b.open(e));
        }
    }
    SUBCASE("self-loops use threshold p") {
        const Graph g = make_doubled_edge_with_loop();
        ChainState chain(g, p, q, BoundaryCondition::free(), false);
        const double u = 0.5 * (hp + p); // would fail the cut-edge threshold
        chain.fk_step(3, u);             // the self-loop
        CHECK(chain.open(3));
    }
}

TEST_CASE("run is deterministic and leaves state alone at zero steps") {
    const MultiGraph mg = sample_simple(32, 3, 5);
    ChainState a(mg.graph(), 0.5, 2.0, BoundaryCondition::free(), true);
    UpdateStream sa(9, mg.edge_count());
    a.run(0, sa);
    CHECK(a.steps_taken() == 0);
    CHECK(a.open_count() == mg.edge_count());

    a.run(5000, sa);
    ChainState b(mg.graph(), 0.5, 2.0, BoundaryCondition::free(), true);
    UpdateStream sb(9, mg.edge_count());
    b.run(5000, sb);
    CHECK(a.config() == b.config());
}

TEST_CASE("long-run single-edge marginal matches hat_p") {
    const double p = 0.5, q = 2.0;
    ChainState chain(make_single_edge(), p, q, BoundaryCondition::free(), false);
    UpdateStream s(11, 1);
    uint64_t open_steps = 0;
    const uint64_t steps = 1000000;
    for (uint64_t i = 0; i < steps; ++i) {
        const auto [e, u] = s.next();
        chain.fk_step(e, u);
        open_steps += chain.open(0);
    }
    CHECK(double(open_steps) / steps == doctest::Approx(hat_p(p, q)).epsilon(0.02));
}

TEST_CASE("long-run triangle marginal matches enumeration") {
    ChainState chain(make_triangle(), 0.5, 2.0, BoundaryCondition::free(), false);
    UpdateStream s(13, 3);
    std::vector<uint64_t> open_steps(3, 0);
    const uint64_t steps = 1000000;
    for (uint64_t i = 0; i < steps; ++i) {
        const auto [e, u] = s.next();
        chain.fk_step(e, u);
        for (int j = 0; j < 3; ++j) open_steps[j] += chain.open(j);
    }
    for (int j = 0; j < 3; ++j)
        CHECK(double(open_steps[j]) / steps == doctest::Approx(5.0 / 14.0).epsilon(0.03));
}

TEST_CASE("grand coupling") {
    const MultiGraph mg = sample_simple(64, 3, 21);
    const Graph& g = mg.graph();
    SUBCASE("identical inits couple at time zero") {
        std::vector<uint8_t> x(g.edge_count(), 0);
        for (size_t i = 0; i < x.size(); i += 3) x[i] = 1;
        const auto res = grand_coupling_run(g, 0.5, 2.0, BoundaryCondition::free(), {x, x}, 100, 1);
        REQUIRE(res.coupling_time.has_value());
        CHECK(*res.coupling_time == 0);
    }
    SUBCASE("wired/free pair stays ordered and couples") {
        for (uint64_t seed = 0; seed < 10; ++seed) {
            const std::vector<uint8_t> lo(g.edge_count(), 0), hi(g.edge_count(), 1);
            const uint64_t cap = 200 * 64 * 5;
            const auto res = grand_coupling_run(g, 0.5, 2.0, BoundaryCondition::free(), {lo, hi},
                                                cap, seed, /*audit_order=*/true);
            CHECK(res.order_preserved);
            REQUIRE(res.coupling_time.has_value());
            CHECK(res.finals[0] == res.finals[1]);
        }
    }
}

TEST_CASE("q=1 coupling time is the coupon collector time") {
    // 256 edges; at q=1 every update resamples Ber(p) with the shared u, so
    // the pair couples exactly when every edge has been touched
    const MultiGraph mg = sample_cm(128, 4, 3);
    REQUIRE(mg.edge_count() == 256);
    const CouplingTimeSummary s = coupling_time_estimate(mg.graph(), 0.3, 1.0, 300, 17);
    CHECK(s.censored_count == 0);
    const double expect = coupon_collector_mean(256);
    CHECK(s.mean_time == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("coupling time on the single-edge graph is always one") {
    const Graph g = make_single_edge();
    const CouplingTimeSummary s = coupling_time_estimate(g, 0.5, 2.0, 50, 23);
    for (double t : s.times) CHECK(t == 1.0);
}

TEST_CASE("parallel and serial coupling harnesses agree") {
    const MultiGraph mg = sample_simple(48, 3, 29);
    const CouplingTimeSummary a = coupling_time_estimate(mg.graph(), 0.5, 2.0, 12, 31);
    const CouplingTimeSummary b = coupling_time_estimate_serial(mg.graph(), 0.5, 2.0, 12, 31);
    CHECK(a.times == b.times);
    CHECK(a.censored_count == b.censored_count);
}

TEST_CASE("censored chain") {
    const MultiGraph mg = sample_simple(64, 3, 37);
    const Graph& g = mg.graph();
    const double p = 0.5, q = 2.0;

    SUBCASE("A = E(G) equals the full wired chain") {
        std::vector<uint32_t> all(g.edge_count());
        for (uint32_t e = 0; e < g.edge_count(); ++e) all[e] = e;
        UpdateStream s1(41, g.edge_count());
        const auto censored = censored_localized_chain(g, all, s1, 20000, p, q);
        ChainState full(g, p, q, BoundaryCondition::free(), true);
        UpdateStream s2(41, g.edge_count());
        full.run(20000, s2);
        CHECK(censored == full.config());
    }
    SUBCASE("empty A returns nothing but advances the stream") {
        UpdateStream s(43, g.edge_count());
        const auto conf = censored_localized_chain(g, {}, s, 777, p, q);
        CHECK(conf.empty());
        CHECK(s.position() == 777);
    }
    SUBCASE("pathwise domination of the full wired chain") {
        for (uint64_t seed = 0; seed < 20; ++seed) {
            const Ball b = ball(g, static_cast<uint32_t>(seed % g.n()), 2);
            CensoredChain local(g, b.edge_ids);
            ChainState full(g, p, q, BoundaryCondition::free(), true);
            UpdateStream s(100 + seed, g.edge_count());
            for (int i = 0; i < 10000; ++i) {
                const auto [e, u] = s.next();
                local.step(e, u, p, q);
                full.fk_step(e, u);
            }
            const auto conf = local.config_on_a();
            for (size_t j = 0; j < b.edge_ids.size(); ++j)
                CHECK(conf[j] >= full.open(b.edge_ids[j]));
        }
    }
}

TEST_CASE("Swendsen-Wang and the spin assignment") {
    SUBCASE("p near one keeps a connected monochromatic graph monochromatic") {
        // from the constant coloring every edge percolates, so the whole
        // graph is one component and gets a single fresh color
        const MultiGraph mg = sample_simple(32, 3, 47);
        RandomSource rng(1);
        SpinConfig spins;
        spins.spins.assign(mg.n(), 2);
        sw_step(spins, mg.graph(), 1.0 - 1e-12, 3, rng);
        for (uint32_t v = 1; v < mg.n(); ++v) CHECK(spins.spins[v] == spins.spins[0]);
        // and repeated steps stay constant whatever the color
        for (int it = 0; it < 5; ++it) {
            sw_step(spins, mg.graph(), 1.0 - 1e-12, 3, rng);
            for (uint32_t v = 1; v < mg.n(); ++v) CHECK(spins.spins[v] == spins.spins[0]);
        }
    }
    SUBCASE("q=1 keeps spins constant") {
        const Graph g = make_triangle();
        RandomSource rng(2);
        SpinConfig spins;
        spins.spins.assign(3, 0);
        sw_step(spins, g, 0.5, 1, rng);
        for (uint32_t v = 0; v < 3; ++v) CHECK(spins.spins[v] == 0);
    }
    SUBCASE("ES spin assignment reproduces the exact agreement probability") {
        // P(sigma_u = sigma_v) = P(u<->v) + (1 - P(u<->v))/2 with
        // P(u<->v) = 3/7 on the triangle at (p,q) = (0.5, 2)
        const Graph g = make_triangle();
        const ExactTable t = enumerate_rc(g, 0.5, 2.0, BoundaryCondition::free());
        RandomSource rng(3);
        std::vector<double> cdf(t.prob.size());
        double acc = 0;
        for (size_t i = 0; i < t.prob.size(); ++i) {
            acc += t.prob[i];
            cdf[i] = acc;
        }
        uint64_t agree = 0;
        const int trials = 200000;
        for (int i = 0; i < trials; ++i) {
            const double u = rng.u01();
            const size_t mask =
                std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
            std::vector<uint8_t> omega(3);
            for (int e = 0; e < 3; ++e) omega[e] = (mask >> e) & 1;
            const SpinConfig spins = potts_from_rc(g, omega, 2, rng.bits());
            agree += spins.spins[0] == spins.spins[1];
        }
        const double expect = 3.0 / 7.0 + (1.0 - 3.0 / 7.0) / 2.0; // 5/7
        CHECK(double(agree) / trials == doctest::Approx(expect).epsilon(0.01));
    }
    SUBCASE("parameter checks") {
        const Graph g = make_triangle();
        RandomSource rng(4);
        SpinConfig spins;
        spins.spins.assign(3, 0);
        CHECK_THROWS_AS(sw_step(spins, g, 1.5, 2, rng), parameter_error);
        CHECK_THROWS_AS(potts_from_rc(g, {1, 1}, 2, 1), usage_error);
    }
}

TEST_CASE("stationarity of long runs against the exact table") {
    // empirical edge marginals on an enumerable multigraph with a double
    // edge and a self-loop
    const Graph g = make_doubled_edge_with_loop();
    const ExactTable t = enumerate_rc(g, 0.45, 1.7, BoundaryCondition::free());
    ChainState chain(g, 0.45, 1.7, BoundaryCondition::free(), true);
    UpdateStream s(53, g.edge_count());
    std::vector<uint64_t> open_steps(g.edge_count(), 0);
    const uint64_t steps = 400000;
    for (uint64_t i = 0; i < steps; ++i) {
        const auto [e, u] = s.next();
        chain.fk_step(e, u);
        for (uint32_t j = 0; j < g.edge_count(); ++j) open_steps[j] += chain.open(j);
    }
    for (uint32_t j = 0; j < g.edge_count(); ++j)
        CHECK(double(open_steps[j]) / steps ==
              doctest::Approx(edge_marginal(t, j)).epsilon(0.03));
}

TEST_CASE("event log captures steps") {
    ChainState chain(make_triangle(), 0.5, 2.0, BoundaryCondition::free(), false);
    std::vector<TrajectoryEvent> events;
    chain.set_event_log(&events);
    UpdateStream s(59, 3);
    chain.run(25, s);
    CHECK(events.size() == 25);
    CHECK(events.front().step == 1);
    CHECK(events.back().step == 25);
}
