#include "rc/boundary.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "rc/errors.hpp"

namespace rc {

BoundaryCondition BoundaryCondition::wired(std::vector<uint32_t> vertices) {
    BoundaryCondition bc;
    bc.add_class(std::move(vertices));
    return bc;
}

void BoundaryCondition::add_class(std::vector<uint32_t> vertices) {
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    if (vertices.size() < 2) return; // singleton classes are implicit
    for (const auto& cls : classes_)
        for (uint32_t v : vertices)
            if (std::binary_search(cls.begin(), cls.end(), v))
                throw usage_error("BoundaryCondition: vertex in two classes");
    classes_.push_back(std::move(vertices));
    normalize();
}

void BoundaryCondition::normalize() {
    std::sort(classes_.begin(), classes_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

uint32_t BoundaryCondition::class_count(uint32_t n) const {
    uint32_t merged = 0;
    for (const auto& cls : classes_) merged += static_cast<uint32_t>(cls.size()) - 1;
    return n - merged;
}

bool BoundaryCondition::refines(const BoundaryCondition& other) const {
    for (const auto& cls : classes_) {
        // All members of cls must share a class of `other`.
        const auto* host = static_cast<const std::vector<uint32_t>*>(nullptr);
        for (const auto& ocls : other.classes_)
            if (std::binary_search(ocls.begin(), ocls.end(), cls.front())) {
                host = &ocls;
                break;
            }
        if (host == nullptr) return false; // cls.front() singleton in other
        for (uint32_t v : cls)
            if (!std::binary_search(host->begin(), host->end(), v)) return false;
    }
    return true;
}

BoundaryCondition BoundaryCondition::join(const BoundaryCondition& a, const BoundaryCondition& b,
                                          uint32_t n) {
    std::vector<uint32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](uint32_t x, uint32_t y) {
        x = find(x);
        y = find(y);
        if (x != y) parent[x] = y;
    };
    for (const auto& cls : a.classes_)
        for (size_t i = 1; i < cls.size(); ++i) unite(cls[0], cls[i]);
    for (const auto& cls : b.classes_)
        for (size_t i = 1; i < cls.size(); ++i) unite(cls[0], cls[i]);

    std::unordered_map<uint32_t, std::vector<uint32_t>> groups;
    for (uint32_t v = 0; v < n; ++v) groups[find(v)].push_back(v);
    BoundaryCondition out;
    for (auto& [root, members] : groups)
        if (members.size() >= 2) out.add_class(std::move(members));
    return out;
}

std::vector<Edge> BoundaryCondition::ghost_edges() const {
    std::vector<Edge> out;
    for (const auto& cls : classes_)
        for (size_t i = 0; i + 1 < cls.size(); ++i) out.push_back({cls[i], cls[i + 1]});
    return out;
}

std::vector<int32_t> BoundaryCondition::class_index(uint32_t n) const {
    std::vector<int32_t> idx(n, -1);
    for (size_t c = 0; c < classes_.size(); ++c)
        for (uint32_t v : classes_[c]) {
            if (v >= n) throw usage_error("BoundaryCondition: vertex out of range");
            idx[v] = static_cast<int32_t>(c);
        }
    return idx;
}

} // namespace rc
