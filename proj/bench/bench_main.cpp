// Timing harness comparing the OpenMP kernels against their serial reference
// implementations. Correctness of the pairs is covered by the unit tests;
// this reports throughput only.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rc/dynamics.hpp"
#include "rc/exact.hpp"
#include "rc/lab.hpp"
#include "rc/multigraph.hpp"
#include "rc/shattering.hpp"
#include "rc/tree.hpp"

using namespace rc;

namespace {

template <typename F>
double time_ms(F&& fn, int repeats = 1) {
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
}

void report(const std::string& name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.2f ms   omp %9.2f ms   speedup %5.2fx\n", name.c_str(), serial_ms,
                parallel_ms, parallel_ms > 0 ? serial_ms / parallel_ms : 0.0);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif

    // exact enumeration on a tree of 21 edges
    {
        const CompleteTree t = build_complete_tree(3, 3, TreeBc::wired);
        const double s = time_ms([&] { enumerate_rc_serial(t.graph, 0.5, 2.0, t.bc); });
        const double par = time_ms([&] { enumerate_rc(t.graph, 0.5, 2.0, t.bc); });
        report("enumerate 2^21", s, par);
    }

    // induced-boundary sparsity scan
    {
        const MultiGraph mg = sample_simple(1024, 3, 42);
        ChainState chain(mg.graph(), 0.5, 2.0, BoundaryCondition::free(), true);
        UpdateStream stream(7, mg.edge_count());
        chain.run(100000, stream);
        const auto omega = chain.config();
        const double s = time_ms([&] { sparsity_serial(mg.graph(), omega, 4, 10); });
        const double par = time_ms([&] { sparsity(mg.graph(), omega, 4, 10); });
        report("sparsity n=1024 R=4", s, par);
    }

    // treelike scan
    {
        const MultiGraph mg = sample_simple(4096, 3, 43);
        const double s = time_ms([&] { is_lr_treelike_serial(mg.graph(), 5, 4); });
        const double par = time_ms([&] { is_lr_treelike(mg.graph(), 5, 4); });
        report("treelike n=4096 R=4", s, par);
    }

    // coupling-time rep fan-out
    {
        const MultiGraph mg = sample_simple(256, 3, 44);
        const double s =
            time_ms([&] { coupling_time_estimate_serial(mg.graph(), 0.5, 2.0, 8, 11); });
        const double par = time_ms([&] { coupling_time_estimate(mg.graph(), 0.5, 2.0, 8, 11); });
        report("coupling reps n=256", s, par);
    }

    return 0;
}
