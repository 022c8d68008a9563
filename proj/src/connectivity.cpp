#include "rc/connectivity.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

#include "rc/errors.hpp"
#include "rc/rng.hpp"

namespace rc {

namespace {

constexpr uint32_t NIL = UINT32_MAX;

// ----------------------------------------------------------------------------
// Euler-tour forest for one level of the spanning structure. The tour of a
// tree is the circular arc sequence with every vertex node interleaved at its
// visit; singleton vertices are one-node tours. Stored as treaps with parent
// pointers; split is by index.
// ----------------------------------------------------------------------------
class EulerForest {
public:
    EulerForest(uint32_t n, uint64_t seed) : n_(n), rng_(seed) {
        nodes_.reserve(2 * n);
        vertex_node_.resize(n);
        for (uint32_t v = 0; v < n; ++v) vertex_node_[v] = new_node(v, /*is_vertex=*/true);
    }

    bool connected(uint32_t u, uint32_t v) const {
        return root_of(vertex_node_[u]) == root_of(vertex_node_[v]);
    }

    uint32_t tree_root(uint32_t v) const { return root_of(vertex_node_[v]); }

    uint32_t tree_vertex_count(uint32_t v) const { return nodes_[tree_root(v)].cnt_vertex; }

    // Links u and v through edge id e; returns the two arc handles (u->v, v->u).
    std::pair<uint32_t, uint32_t> link(uint32_t u, uint32_t v, uint32_t e) {
        const uint32_t tu = reroot(u);
        const uint32_t tv = reroot(v);
        const uint32_t a_uv = new_node(e, false);
        const uint32_t a_vu = new_node(e, false);
        // tour(u) ++ [u->v] ++ tour(v) ++ [v->u]
        uint32_t t = merge(tu, a_uv);
        t = merge(t, tv);
        t = merge(t, a_vu);
        return {a_uv, a_vu};
    }

    // Removes the tree edge whose arcs are (a1, a2).
    void cut(uint32_t a1, uint32_t a2) {
        uint32_t i = index_of(a1);
        uint32_t j = index_of(a2);
        uint32_t root = root_of(a1);
        if (i > j) std::swap(i, j);
        auto [left, rest] = split(root, i);          // left = [0,i)
        auto [mid_with_a1, tail] = split(rest, j - i + 1);
        auto [a_first, inner] = split(mid_with_a1, 1);
        auto [inner2, a_second] = split(inner, node_count(inner) - 1);
        free_node(a_first);
        free_node(a_second);
        (void)inner2; // one side of the cut; stays as its own tour
        merge(left, tail);
    }

    void set_vertex_flag(uint32_t v, bool on) { set_flag(vertex_node_[v], kVertexFlag, on); }
    void set_arc_flag(uint32_t arc, bool on) { set_flag(arc, kArcFlag, on); }

    // Any vertex in the tree of `root` whose flag is set; NIL if none.
    uint32_t find_flagged_vertex(uint32_t root) const { return find_flag(root, kVertexFlag); }
    // Any flagged arc in the tree of `root`; returns its edge id or NIL.
    uint32_t find_flagged_arc(uint32_t root) const { return find_flag(root, kArcFlag); }

private:
    static constexpr uint8_t kVertexFlag = 1;
    static constexpr uint8_t kArcFlag = 2;

    struct Node {
        uint32_t left = NIL, right = NIL, parent = NIL;
        uint64_t priority = 0;
        uint32_t cnt_total = 1;
        uint32_t cnt_vertex = 0;
        uint32_t id = 0; // vertex id or edge id
        uint8_t is_vertex = 0;
        uint8_t flags = 0;     // own flags
        uint8_t sub_flags = 0; // or over subtree (incl own)
    };

    uint32_t new_node(uint32_t id, bool is_vertex) {
        uint32_t h;
        if (!free_list_.empty()) {
            h = free_list_.back();
            free_list_.pop_back();
            nodes_[h] = Node{};
        } else {
            h = static_cast<uint32_t>(nodes_.size());
            nodes_.emplace_back();
        }
        Node& nd = nodes_[h];
        nd.priority = rng_.bits();
        nd.id = id;
        nd.is_vertex = is_vertex ? 1 : 0;
        nd.cnt_vertex = is_vertex ? 1 : 0;
        return h;
    }

    void free_node(uint32_t h) {
        nodes_[h].parent = NIL;
        free_list_.push_back(h);
    }

    uint32_t node_count(uint32_t t) const { return t == NIL ? 0 : nodes_[t].cnt_total; }

    void pull(uint32_t t) {
        Node& nd = nodes_[t];
        nd.cnt_total = 1;
        nd.cnt_vertex = nd.is_vertex;
        nd.sub_flags = nd.flags;
        for (uint32_t c : {nd.left, nd.right}) {
            if (c == NIL) continue;
            nd.cnt_total += nodes_[c].cnt_total;
            nd.cnt_vertex += nodes_[c].cnt_vertex;
            nd.sub_flags |= nodes_[c].sub_flags;
        }
    }

    uint32_t root_of(uint32_t h) const {
        while (nodes_[h].parent != NIL) h = nodes_[h].parent;
        return h;
    }

    uint32_t index_of(uint32_t h) const {
        uint32_t idx = node_count(nodes_[h].left);
        uint32_t cur = h;
        while (nodes_[cur].parent != NIL) {
            const uint32_t p = nodes_[cur].parent;
            if (nodes_[p].right == cur) idx += node_count(nodes_[p].left) + 1;
            cur = p;
        }
        return idx;
    }

    uint32_t merge(uint32_t a, uint32_t b) {
        if (a == NIL) return b;
        if (b == NIL) return a;
        if (nodes_[a].priority > nodes_[b].priority) {
            const uint32_t r = merge(nodes_[a].right, b);
            nodes_[a].right = r;
            nodes_[r].parent = a;
            pull(a);
            nodes_[a].parent = NIL;
            return a;
        }
        const uint32_t l = merge(a, nodes_[b].left);
        nodes_[b].left = l;
        nodes_[l].parent = b;
        pull(b);
        nodes_[b].parent = NIL;
        return b;
    }

    // Splits into ([0,k), [k,end)).
    std::pair<uint32_t, uint32_t> split(uint32_t t, uint32_t k) {
        if (t == NIL) return {NIL, NIL};
        nodes_[t].parent = NIL;
        if (k == 0) return {NIL, t};
        if (k >= nodes_[t].cnt_total) return {t, NIL};
        const uint32_t lcnt = node_count(nodes_[t].left);
        if (k <= lcnt) {
            const uint32_t l = nodes_[t].left;
            if (l != NIL) nodes_[l].parent = NIL;
            auto [a, b] = split(l, k);
            nodes_[t].left = b;
            if (b != NIL) nodes_[b].parent = t;
            pull(t);
            return {a, t};
        }
        const uint32_t r = nodes_[t].right;
        if (r != NIL) nodes_[r].parent = NIL;
        auto [a, b] = split(r, k - lcnt - 1);
        nodes_[t].right = a;
        if (a != NIL) nodes_[a].parent = t;
        pull(t);
        return {t, b};
    }

    // Rotates the tour so the vertex node of v comes first; returns treap root.
    uint32_t reroot(uint32_t v) {
        const uint32_t h = vertex_node_[v];
        const uint32_t root = root_of(h);
        const uint32_t i = index_of(h);
        if (i == 0) return root;
        auto [front, back] = split(root, i);
        return merge(back, front);
    }

    void set_flag(uint32_t h, uint8_t bit, bool on) {
        Node& nd = nodes_[h];
        const uint8_t before = nd.flags;
        nd.flags = on ? (before | bit) : (before & ~bit);
        if (nd.flags == before) return;
        for (uint32_t cur = h; cur != NIL; cur = nodes_[cur].parent) pull(cur);
    }

    uint32_t find_flag(uint32_t root, uint8_t bit) const {
        if (root == NIL || !(nodes_[root].sub_flags & bit)) return NIL;
        uint32_t t = root;
        while (true) {
            const Node& nd = nodes_[t];
            if (nd.flags & bit) return nd.id;
            if (nd.left != NIL && (nodes_[nd.left].sub_flags & bit)) {
                t = nd.left;
                continue;
            }
            t = nd.right;
        }
    }

    uint32_t n_;
    std::vector<Node> nodes_;
    std::vector<uint32_t> vertex_node_;
    std::vector<uint32_t> free_list_;
    RandomSource rng_;
};

// ----------------------------------------------------------------------------
// Shared edge bookkeeping: public edges of the graph plus permanent ghost
// edges from the wirings; self-loops never enter a backend's structure.
// ----------------------------------------------------------------------------
struct EdgeTable {
    std::vector<Edge> all;       // public edges then ghosts
    uint32_t public_count = 0;
    std::vector<uint8_t> open;   // public-only view kept separately
};

} // namespace

// ----------------------------------------------------------------------------
// Impl
// ----------------------------------------------------------------------------
struct DynConnState::Impl {
    virtual ~Impl() = default;
    virtual void toggle(uint32_t e, bool open) = 0;
    virtual bool connected(uint32_t u, uint32_t v) const = 0;
    virtual size_t component_count() const = 0;
    virtual bool is_cut_edge(uint32_t e) = 0;
    virtual DynConnState::Backend kind() const = 0;

    uint32_t n = 0;
    EdgeTable et;
    size_t open_public = 0;

    void check_edge(uint32_t e) const {
        if (e >= et.public_count) throw usage_error("DynConnState: edge id out of range");
    }
};

namespace {

// --- naive backend: BFS over open adjacency, UF recount for components ------
struct NaiveImpl final : DynConnState::Impl {
    // adjacency over open non-loop edges; per-edge slot positions for O(1) removal
    std::vector<std::vector<uint32_t>> adj; // edge ids
    std::vector<std::array<uint32_t, 2>> slot;
    std::vector<int32_t> class_of;
    std::vector<std::vector<uint32_t>> class_members;
    mutable std::vector<uint32_t> stamp;
    mutable std::vector<uint8_t> class_stamp;
    mutable std::vector<uint32_t> queue;
    mutable uint32_t epoch = 0;

    NaiveImpl(const Graph& g, const BoundaryCondition& bc) {
        n = g.n();
        et.public_count = g.edge_count();
        et.all = g.edges();
        et.open.assign(et.public_count, 0);
        adj.resize(n);
        slot.assign(et.public_count, {NIL, NIL});
        class_of = bc.class_index(n);
        for (const auto& cls : bc.classes()) class_members.push_back(cls);
        stamp.assign(n, 0);
        class_stamp.assign(class_members.size(), 0);
    }

    DynConnState::Backend kind() const override { return DynConnState::Backend::naive; }

    void toggle(uint32_t e, bool want) override {
        check_edge(e);
        if (et.open[e] == static_cast<uint8_t>(want)) return;
        et.open[e] = want ? 1 : 0;
        open_public += want ? 1 : -1;
        const Edge& ed = et.all[e];
        if (ed.u == ed.v) return;
        if (want) {
            slot[e][0] = static_cast<uint32_t>(adj[ed.u].size());
            adj[ed.u].push_back(e);
            slot[e][1] = static_cast<uint32_t>(adj[ed.v].size());
            adj[ed.v].push_back(e);
        } else {
            auto drop = [&](uint32_t v, uint32_t s) {
                const uint32_t last = adj[v].back();
                adj[v][s] = last;
                if (et.all[last].u == v && slot[last][0] == adj[v].size() - 1)
                    slot[last][0] = s;
                else if (et.all[last].v == v)
                    slot[last][1] = s;
                else
                    slot[last][0] = s;
                adj[v].pop_back();
            };
            drop(ed.u, slot[e][0]);
            drop(ed.v, slot[e][1]);
            slot[e] = {NIL, NIL};
        }
    }

    bool bfs(uint32_t from, uint32_t to, uint32_t skip_edge) const {
        if (from == to) return true;
        ++epoch;
        if (epoch == 0) {
            std::fill(stamp.begin(), stamp.end(), 0);
            epoch = 1;
        }
        std::fill(class_stamp.begin(), class_stamp.end(), 0);
        queue.clear();
        auto visit = [&](uint32_t v) -> bool {
            if (stamp[v] == epoch) return false;
            stamp[v] = epoch;
            queue.push_back(v);
            return v == to;
        };
        if (visit(from)) return true;
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            const uint32_t v = queue[qi];
            if (class_of[v] >= 0 && !class_stamp[class_of[v]]) {
                class_stamp[class_of[v]] = 1;
                for (uint32_t w : class_members[class_of[v]])
                    if (visit(w)) return true;
            }
            for (uint32_t e : adj[v]) {
                if (e == skip_edge) continue;
                const uint32_t w = et.all[e].u == v ? et.all[e].v : et.all[e].u;
                if (visit(w)) return true;
            }
        }
        return false;
    }

    bool connected(uint32_t u, uint32_t v) const override { return bfs(u, v, NIL); }

    size_t component_count() const override {
        std::vector<uint32_t> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](uint32_t x) {
            while (parent[x] != x) {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            return x;
        };
        size_t comps = n;
        auto unite = [&](uint32_t a, uint32_t b) {
            a = find(a);
            b = find(b);
            if (a != b) {
                parent[a] = b;
                --comps;
            }
        };
        for (uint32_t e = 0; e < et.public_count; ++e)
            if (et.open[e] && et.all[e].u != et.all[e].v) unite(et.all[e].u, et.all[e].v);
        for (const auto& cls : class_members)
            for (size_t i = 1; i < cls.size(); ++i) unite(cls[0], cls[i]);
        return comps;
    }

    bool is_cut_edge(uint32_t e) override {
        check_edge(e);
        const Edge& ed = et.all[e];
        if (ed.u == ed.v) return false;
        return !bfs(ed.u, ed.v, e);
    }
};

// --- forest backend: spanning forest with edge levels -----------------------
struct ForestImpl final : DynConnState::Impl {
    struct EdgeInfo {
        uint32_t level = 0;
        bool present = false; // participates in the structure (open, non-loop)
        bool is_tree = false;
        std::vector<std::array<uint32_t, 2>> arcs; // arcs[i] in forest i, for i <= level when tree
        std::array<uint32_t, 2> nontree_slot{NIL, NIL};
    };

    std::vector<EulerForest> forests;
    std::vector<EdgeInfo> info;
    std::vector<std::vector<std::vector<uint32_t>>> nontree; // [level][vertex] -> edge ids
    uint32_t levels = 1;
    size_t comps = 0;

    ForestImpl(const Graph& g, const BoundaryCondition& bc) {
        n = g.n();
        et.public_count = g.edge_count();
        et.all = g.edges();
        et.open.assign(et.public_count, 0);
        while ((1u << levels) < n) ++levels;
        ++levels;
        forests.reserve(levels);
        for (uint32_t i = 0; i < levels; ++i) forests.emplace_back(n, 0x5eedc0de + i);
        nontree.assign(levels, std::vector<std::vector<uint32_t>>(n));
        comps = n;
        for (const Edge& ge : bc.ghost_edges()) et.all.push_back(ge);
        info.resize(et.all.size());
        for (uint32_t e = et.public_count; e < et.all.size(); ++e) structure_insert(e);
    }

    DynConnState::Backend kind() const override { return DynConnState::Backend::forest; }

    void vertex_flag_refresh(uint32_t level, uint32_t v) {
        forests[level].set_vertex_flag(v, !nontree[level][v].empty());
    }

    void nontree_add(uint32_t e, uint32_t level) {
        EdgeInfo& ei = info[e];
        ei.level = level;
        ei.is_tree = false;
        const Edge& ed = et.all[e];
        ei.nontree_slot[0] = static_cast<uint32_t>(nontree[level][ed.u].size());
        nontree[level][ed.u].push_back(e);
        ei.nontree_slot[1] = static_cast<uint32_t>(nontree[level][ed.v].size());
        nontree[level][ed.v].push_back(e);
        vertex_flag_refresh(level, ed.u);
        vertex_flag_refresh(level, ed.v);
    }

    void nontree_remove(uint32_t e) {
        EdgeInfo& ei = info[e];
        const Edge& ed = et.all[e];
        const uint32_t level = ei.level;
        auto drop = [&](uint32_t v, uint32_t s) {
            auto& lst = nontree[level][v];
            const uint32_t moved = lst.back();
            lst[s] = moved;
            lst.pop_back();
            if (moved != e) {
                if (et.all[moved].u == v && info[moved].nontree_slot[0] == lst.size())
                    info[moved].nontree_slot[0] = s;
                else
                    info[moved].nontree_slot[1] = s;
            }
        };
        // order matters if both endpoints share the vertex list tail
        drop(ed.u, ei.nontree_slot[0]);
        drop(ed.v, ei.nontree_slot[1]);
        ei.nontree_slot = {NIL, NIL};
        vertex_flag_refresh(level, ed.u);
        vertex_flag_refresh(level, ed.v);
    }

    void make_tree_edge(uint32_t e, uint32_t level) {
        EdgeInfo& ei = info[e];
        ei.level = level;
        ei.is_tree = true;
        ei.arcs.assign(level + 1, {NIL, NIL});
        const Edge& ed = et.all[e];
        for (uint32_t i = 0; i <= level; ++i) {
            auto [a1, a2] = forests[i].link(ed.u, ed.v, e);
            ei.arcs[i] = {a1, a2};
        }
        forests[level].set_arc_flag(ei.arcs[level][0], true);
    }

    void structure_insert(uint32_t e) {
        const Edge& ed = et.all[e];
        EdgeInfo& ei = info[e];
        ei.present = true;
        if (!forests[0].connected(ed.u, ed.v)) {
            make_tree_edge(e, 0);
            --comps;
        } else {
            nontree_add(e, 0);
        }
    }

    void structure_remove(uint32_t e) {
        EdgeInfo& ei = info[e];
        ei.present = false;
        if (!ei.is_tree) {
            nontree_remove(e);
            return;
        }
        const uint32_t elevel = ei.level;
        const Edge& ed = et.all[e];
        forests[elevel].set_arc_flag(ei.arcs[elevel][0], false);
        for (uint32_t i = 0; i <= elevel; ++i) forests[i].cut(ei.arcs[i][0], ei.arcs[i][1]);
        ei.arcs.clear();
        ei.is_tree = false;

        // search for a replacement, deepest level first
        for (int32_t i = static_cast<int32_t>(elevel); i >= 0; --i) {
            EulerForest& f = forests[i];
            uint32_t side = ed.u;
            if (f.tree_vertex_count(ed.u) > f.tree_vertex_count(ed.v)) side = ed.v;
            uint32_t root = f.tree_root(side);

            // push level-i tree edges of the smaller side to level i+1
            for (uint32_t fe = f.find_flagged_arc(root); fe != NIL; fe = f.find_flagged_arc(root)) {
                EdgeInfo& fi = info[fe];
                f.set_arc_flag(fi.arcs[i][0], false);
                const Edge& fed = et.all[fe];
                auto [a1, a2] = forests[i + 1].link(fed.u, fed.v, fe);
                fi.arcs.push_back({a1, a2});
                fi.level = i + 1;
                forests[i + 1].set_arc_flag(a1, true);
                root = f.tree_root(side);
            }

            // scan level-i non-tree edges hanging off the smaller side
            for (uint32_t w = f.find_flagged_vertex(root); w != NIL;
                 w = f.find_flagged_vertex(root)) {
                while (!nontree[i][w].empty()) {
                    const uint32_t cand = nontree[i][w].back();
                    const Edge& ced = et.all[cand];
                    const uint32_t other = (ced.u == w) ? ced.v : ced.u;
                    if (f.tree_root(other) == root) {
                        // internal: raise its level
                        nontree_remove(cand);
                        nontree_add(cand, i + 1);
                    } else {
                        // replacement found: becomes a tree edge at level i
                        nontree_remove(cand);
                        make_tree_edge(cand, static_cast<uint32_t>(i));
                        return;
                    }
                }
                root = f.tree_root(side);
            }
        }
        ++comps; // no replacement anywhere: the tree split for real
    }

    void toggle(uint32_t e, bool want) override {
        check_edge(e);
        if (et.open[e] == static_cast<uint8_t>(want)) return;
        et.open[e] = want ? 1 : 0;
        open_public += want ? 1 : -1;
        if (et.all[e].u == et.all[e].v) return; // loops carry no connectivity
        if (want)
            structure_insert(e);
        else
            structure_remove(e);
    }

    bool connected(uint32_t u, uint32_t v) const override {
        return u == v || forests[0].connected(u, v);
    }

    size_t component_count() const override { return comps; }

    bool is_cut_edge(uint32_t e) override {
        check_edge(e);
        const Edge& ed = et.all[e];
        if (ed.u == ed.v) return false;
        if (!et.open[e]) return !forests[0].connected(ed.u, ed.v);
        if (!info[e].is_tree) return false; // the forest path avoids e already
        structure_remove(e);
        const bool cut = !forests[0].connected(ed.u, ed.v);
        structure_insert(e);
        return cut;
    }
};

} // namespace

// ----------------------------------------------------------------------------
// facade
// ----------------------------------------------------------------------------

DynConnState::DynConnState(const Graph& g, const BoundaryCondition& wirings, Backend backend) {
    if (backend == Backend::automatic)
        backend = g.edge_count() >= 512 ? Backend::forest : Backend::naive;
    if (backend == Backend::forest)
        impl_ = std::make_unique<ForestImpl>(g, wirings);
    else
        impl_ = std::make_unique<NaiveImpl>(g, wirings);
}

DynConnState::DynConnState(const Graph& g, const BoundaryCondition& wirings,
                           const std::vector<uint8_t>& omega, Backend backend)
    : DynConnState(g, wirings, backend) {
    if (omega.size() != g.edge_count())
        throw usage_error("DynConnState: config size mismatch");
    for (uint32_t e = 0; e < omega.size(); ++e)
        if (omega[e]) toggle(e, true);
}

DynConnState::~DynConnState() = default;
DynConnState::DynConnState(DynConnState&&) noexcept = default;
DynConnState& DynConnState::operator=(DynConnState&&) noexcept = default;

uint32_t DynConnState::n() const { return impl_->n; }
uint32_t DynConnState::edge_count() const { return impl_->et.public_count; }
void DynConnState::toggle(uint32_t e, bool open) { impl_->toggle(e, open); }
bool DynConnState::open(uint32_t e) const {
    impl_->check_edge(e);
    return impl_->et.open[e] != 0;
}
const std::vector<uint8_t>& DynConnState::config() const { return impl_->et.open; }
size_t DynConnState::open_count() const { return impl_->open_public; }
bool DynConnState::connected(uint32_t u, uint32_t v) const {
    if (u >= impl_->n || v >= impl_->n) throw usage_error("connected: vertex out of range");
    return u == v || impl_->connected(u, v);
}
size_t DynConnState::component_count() const { return impl_->component_count(); }
bool DynConnState::is_cut_edge(uint32_t e) { return impl_->is_cut_edge(e); }
DynConnState::Backend DynConnState::backend() const { return impl_->kind(); }

} // namespace rc
