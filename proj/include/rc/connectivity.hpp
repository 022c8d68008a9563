#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rc/boundary.hpp"
#include "rc/graph.hpp"

namespace rc {

/// Connectivity of (V, open edges) under single-edge toggles, with boundary
/// wirings materialized as permanent ghost edges chaining each class.
///
/// Two interchangeable backends: a from-scratch BFS/union-find oracle, and a
/// spanning forest with Euler-tour trees and edge levels for large runs.
/// `automatic` picks the forest above a small edge count.
class DynConnState {
public:
    enum class Backend { naive, forest, automatic };

    DynConnState(const Graph& g, const BoundaryCondition& wirings,
                 Backend backend = Backend::automatic);
    DynConnState(const Graph& g, const BoundaryCondition& wirings,
                 const std::vector<uint8_t>& omega, Backend backend = Backend::automatic);
    ~DynConnState();

    DynConnState(DynConnState&&) noexcept;
    DynConnState& operator=(DynConnState&&) noexcept;
    DynConnState(const DynConnState&) = delete;
    DynConnState& operator=(const DynConnState&) = delete;

    uint32_t n() const;
    uint32_t edge_count() const;

    void toggle(uint32_t e, bool open);
    bool open(uint32_t e) const;
    const std::vector<uint8_t>& config() const;
    size_t open_count() const;

    bool connected(uint32_t u, uint32_t v) const;
    size_t component_count() const;

    // True iff the endpoints of e are not connected in (open \ {e}) plus the
    // wirings. Independent of the current state of e; self-loops are never
    // cut-edges; a parallel copy counts as an alternative path.
    bool is_cut_edge(uint32_t e);

    Backend backend() const;

    struct Impl; // backend interface; definition internal

private:
    std::unique_ptr<Impl> impl_;
};

} // namespace rc
