#pragma once

#include <cstdint>
#include <vector>

#include "rc/graph.hpp"

namespace rc {

/// A boundary condition is a partition of (a subset of) the vertices whose
/// classes are treated as externally wired. Singleton classes are implicit:
/// only classes of size >= 2 are stored, each sorted, the list sorted by
/// first element. Vertices may appear in at most one class.
class BoundaryCondition {
public:
    BoundaryCondition() = default;

    static BoundaryCondition free() { return {}; }
    static BoundaryCondition wired(std::vector<uint32_t> vertices);

    void add_class(std::vector<uint32_t> vertices);

    const std::vector<std::vector<uint32_t>>& classes() const { return classes_; }
    bool is_free() const { return classes_.empty(); }

    // Number of parts of the partition when viewed over {0,...,n-1}.
    uint32_t class_count(uint32_t n) const;

    // True iff *this is a refinement of other (this <= other): every class of
    // *this is contained in a class of other.
    bool refines(const BoundaryCondition& other) const;

    // Smallest partition coarser than both.
    static BoundaryCondition join(const BoundaryCondition& a, const BoundaryCondition& b, uint32_t n);

    // One ghost edge per consecutive pair within each class.
    std::vector<Edge> ghost_edges() const;

    // class id per vertex, or -1 for implicit singletons.
    std::vector<int32_t> class_index(uint32_t n) const;

    bool operator==(const BoundaryCondition&) const = default;

private:
    void normalize();
    std::vector<std::vector<uint32_t>> classes_;
};

} // namespace rc
