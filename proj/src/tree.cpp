#include "treepack/tree.hpp"

#include "treepack/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace treepack {

RootedTree::RootedTree(std::vector<int> parent, int root) : parent_(std::move(parent)), root_(root)
{
    const int k = int(parent_.size());
    if (k < 1)
        throw InputError("tree must have at least one vertex");
    if (root < 0 || root >= k)
        throw InputError("tree root out of range");
    if (parent_[std::size_t(root)] != -1)
        throw InputError("root must have parent -1");
    degree_.assign(std::size_t(k), 0);
    for (int v = 0; v < k; ++v) {
        if (v == root)
            continue;
        const int p = parent_[std::size_t(v)];
        if (p < 0 || p >= k || p == v)
            throw InputError("vertex " + std::to_string(v) + " has invalid parent " + std::to_string(p));
        ++degree_[std::size_t(v)];
        ++degree_[std::size_t(p)];
    }
    // Every vertex must reach the root without revisiting.
    std::vector<char> state(std::size_t(k), 0); // 0 new, 1 on stack, 2 reaches root
    state[std::size_t(root)] = 2;
    std::vector<int> chain;
    for (int v = 0; v < k; ++v) {
        chain.clear();
        int u = v;
        while (state[std::size_t(u)] == 0) {
            state[std::size_t(u)] = 1;
            chain.push_back(u);
            u = parent_[std::size_t(u)];
        }
        if (state[std::size_t(u)] == 1)
            throw InputError("parent links contain a cycle through vertex " + std::to_string(u));
        for (int w : chain)
            state[std::size_t(w)] = 2;
    }
    max_degree_ = *std::max_element(degree_.begin(), degree_.end());
}

RootedTree RootedTree::path(int order)
{
    if (order < 1)
        throw InputError("path order must be >= 1");
    std::vector<int> parent(static_cast<std::size_t>(order));
    for (int v = 0; v < order; ++v)
        parent[std::size_t(v)] = v - 1;
    return RootedTree(std::move(parent), 0);
}

RootedTree RootedTree::star(int order)
{
    if (order < 1)
        throw InputError("star order must be >= 1");
    std::vector<int> parent(std::size_t(order), 0);
    parent[0] = -1;
    return RootedTree(std::move(parent), 0);
}

std::vector<VertexPair> RootedTree::edges() const
{
    std::vector<VertexPair> out;
    out.reserve(parent_.size());
    for (int v = 0; v < order(); ++v)
        if (v != root_)
            out.emplace_back(v, parent_[std::size_t(v)]);
    return out;
}

std::vector<std::vector<int>> RootedTree::adjacency() const
{
    std::vector<std::vector<int>> adj(parent_.size());
    for (int v = 0; v < order(); ++v) {
        if (v == root_)
            continue;
        adj[std::size_t(v)].push_back(parent_[std::size_t(v)]);
        adj[std::size_t(parent_[std::size_t(v)])].push_back(v);
    }
    for (auto& a : adj)
        std::sort(a.begin(), a.end());
    return adj;
}

int RootedTree::lowest_leaf() const
{
    for (int v = 0; v < order(); ++v)
        if (degree_[std::size_t(v)] <= 1)
            return v;
    throw ContractViolation("tree without a leaf");
}

std::vector<int> RootedTree::preorder() const
{
    std::vector<std::vector<int>> children(parent_.size());
    for (int v = 0; v < order(); ++v)
        if (v != root_)
            children[std::size_t(parent_[std::size_t(v)])].push_back(v);
    std::vector<int> out;
    out.reserve(parent_.size());
    std::vector<int> stack{root_};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        out.push_back(v);
        const auto& ch = children[std::size_t(v)];
        for (auto it = ch.rbegin(); it != ch.rend(); ++it)
            stack.push_back(*it);
    }
    return out;
}

std::int64_t TreeFamily::total_edges() const
{
    std::int64_t total = 0;
    for (const auto& t : trees)
        total += t.edge_count();
    return total;
}

void check_family_bounds(const TreeFamily& fam)
{
    for (std::size_t i = 0; i < fam.trees.size(); ++i) {
        const auto& t = fam.trees[i];
        if (t.order() > fam.n)
            throw InputError("tree " + std::to_string(i) + " has order " + std::to_string(t.order()) +
                             " > n = " + std::to_string(fam.n));
        if (t.max_degree() > fam.delta)
            throw InputError("tree " + std::to_string(i) + " has max degree " + std::to_string(t.max_degree()) +
                             " > delta = " + std::to_string(fam.delta));
    }
}

// ---------------------------------------------------------------------------

namespace {

bool is_small(const RootedTree& t, int n) { return 2 * std::int64_t(t.order()) <= n; }

/// Parent array of t re-rooted at `new_root`.
std::vector<int> reroot(const RootedTree& t, int new_root)
{
    const auto adj = t.adjacency();
    std::vector<int> parent(std::size_t(t.order()), -2);
    parent[std::size_t(new_root)] = -1;
    std::deque<int> queue{new_root};
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int w : adj[std::size_t(v)]) {
            if (parent[std::size_t(w)] == -2) {
                parent[std::size_t(w)] = v;
                queue.push_back(w);
            }
        }
    }
    return parent;
}

struct Merged {
    RootedTree tree;
    std::vector<int> map_second; ///< vertex of the second tree -> merged vertex
};

Merged merge_pair(const RootedTree& a, const RootedTree& b)
{
    const int la = a.lowest_leaf();
    const int lb = b.lowest_leaf();
    const std::vector<int> pb = reroot(b, lb);

    std::vector<int> map_b(std::size_t(b.order()), -1);
    map_b[std::size_t(lb)] = la;
    int next = a.order();
    for (int v = 0; v < b.order(); ++v)
        if (v != lb)
            map_b[std::size_t(v)] = next++;

    std::vector<int> parent = a.parents();
    parent.resize(std::size_t(a.order() + b.order() - 1));
    for (int v = 0; v < b.order(); ++v)
        if (v != lb)
            parent[std::size_t(map_b[std::size_t(v)])] = map_b[std::size_t(pb[std::size_t(v)])];
    return {RootedTree(std::move(parent), a.root()), std::move(map_b)};
}

} // namespace

MergeResult merge_small_trees_tracked(const TreeFamily& fam)
{
    check_family_bounds(fam);
    MergeResult out;
    out.family.n = fam.n;
    out.family.delta = fam.delta;
    out.family.trees = fam.trees;

    // owner[t] = current tree holding input tree t; maps compose as trees merge.
    out.placements.resize(fam.trees.size());
    for (std::size_t t = 0; t < fam.trees.size(); ++t) {
        out.placements[t].tree = int(t);
        out.placements[t].vertex_map.resize(std::size_t(fam.trees[t].order()));
        for (int v = 0; v < fam.trees[t].order(); ++v)
            out.placements[t].vertex_map[std::size_t(v)] = v;
    }

    auto& trees = out.family.trees;
    for (;;) {
        int first = -1;
        int second = -1;
        for (int i = 0; i < int(trees.size()); ++i) {
            if (!is_small(trees[std::size_t(i)], fam.n))
                continue;
            if (first < 0)
                first = i;
            else {
                second = i;
                break;
            }
        }
        if (second < 0)
            break;
        Merged m = merge_pair(trees[std::size_t(first)], trees[std::size_t(second)]);
        trees[std::size_t(first)] = std::move(m.tree);
        trees.erase(trees.begin() + second);
        for (auto& pl : out.placements) {
            if (pl.tree == second) {
                pl.tree = first;
                for (int& v : pl.vertex_map)
                    v = m.map_second[std::size_t(v)];
            } else if (pl.tree > second) {
                --pl.tree;
            }
        }
    }
    for (int i = 0; i < int(trees.size()); ++i)
        if (is_small(trees[std::size_t(i)], fam.n))
            out.family.exceptional = i;
    return out;
}

TreeFamily merge_small_trees(const TreeFamily& fam) { return merge_small_trees_tracked(fam).family; }

// ---------------------------------------------------------------------------

std::vector<int> GroupedFamily::group_sizes() const
{
    std::vector<int> out;
    for (const auto& g : groups)
        out.push_back(int(g.size()));
    return out;
}

int group_count(double epsilon, std::optional<int> cap)
{
    if (!(epsilon > 0.0))
        throw InputError("epsilon must be positive");
    int c = int(std::ceil(50.0 / epsilon - 1e-9));
    if (cap)
        c = std::min(c, *cap);
    return std::max(c, 1);
}

int group_endpoint(int n, int c, int i)
{
    if (i == 0)
        return n / 2;
    // ceil(n (c + i) / (2c)) in integers.
    const std::int64_t num = std::int64_t(n) * (c + i);
    const std::int64_t den = 2 * std::int64_t(c);
    return int((num + den - 1) / den);
}

PaddedTree pad_to_order(const RootedTree& t, int target, int source)
{
    if (target < t.order())
        throw InputError("padding target below tree order");
    PaddedTree out;
    out.original_order = t.order();
    out.source = source;
    if (target == t.order()) {
        out.tree = t;
        return out;
    }
    std::vector<int> parent = t.parents();
    int prev = t.lowest_leaf();
    for (int v = t.order(); v < target; ++v) {
        parent.push_back(prev);
        prev = v;
    }
    out.tree = RootedTree(std::move(parent), t.root());
    return out;
}

GroupedFamily group_and_pad(const TreeFamily& fam, int c)
{
    if (c < 1)
        throw InputError("group count must be >= 1");
    check_family_bounds(fam);
    GroupedFamily out;
    out.n = fam.n;
    out.delta = fam.delta;
    out.c = c;
    for (int i = 0; i <= c; ++i)
        out.endpoints.push_back(group_endpoint(fam.n, c, i));
    out.groups.resize(std::size_t(c));

    for (int s = 0; s < int(fam.trees.size()); ++s) {
        const auto& t = fam.trees[std::size_t(s)];
        if (2 * std::int64_t(t.order()) <= fam.n) {
            if (fam.exceptional != s)
                throw InputError("tree " + std::to_string(s) + " of order " + std::to_string(t.order()) +
                                 " <= n/2 is not the exceptional tree");
            out.exceptional_tree = t;
            out.exceptional_source = s;
            continue;
        }
        int i = 1;
        while (t.order() > out.endpoints[std::size_t(i)])
            ++i;
        PaddedTree p = pad_to_order(t, out.endpoints[std::size_t(i)], s);
        out.added_path_edges += p.tree.order() - p.original_order;
        out.groups[std::size_t(i - 1)].push_back(std::move(p));
    }
    return out;
}

GroupedFamily group_and_pad(const TreeFamily& fam, double epsilon)
{
    return group_and_pad(fam, group_count(epsilon));
}

// ---------------------------------------------------------------------------

std::vector<int> LevelForest::roots() const
{
    std::vector<int> out;
    for (int v = 0; v < order; ++v)
        if (role[std::size_t(v)] == VertexRole::Root)
            out.push_back(v);
    return out;
}

std::vector<VertexPair> LevelForest::edges() const
{
    std::vector<VertexPair> out;
    for (int v = 0; v < order; ++v)
        for (int w : adjacency[std::size_t(v)])
            if (v < w)
                out.emplace_back(v, w);
    return out;
}

namespace {

std::vector<std::vector<int>> forest_adjacency(int order, const std::vector<VertexPair>& edges)
{
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(order));
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= order || v >= order || u == v)
            throw InputError("forest edge {" + std::to_string(u) + "," + std::to_string(v) + "} invalid");
        adj[std::size_t(u)].push_back(v);
        adj[std::size_t(v)].push_back(u);
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        if (std::adjacent_find(a.begin(), a.end()) != a.end())
            throw InputError("forest has a repeated edge");
    }
    return adj;
}

} // namespace

LevelForest make_forest(int order, const std::vector<VertexPair>& edges, std::vector<VertexRole> roles)
{
    if (int(roles.size()) != order)
        throw InputError("role list length differs from forest order");
    LevelForest f;
    f.order = order;
    f.adjacency = forest_adjacency(order, edges);
    f.role = std::move(roles);
    for (auto [u, v] : edges) {
        const VertexRole a = f.role[std::size_t(u)];
        const VertexRole b = f.role[std::size_t(v)];
        if (a != VertexRole::Root && a == b)
            throw InputError("forest edge {" + std::to_string(u) + "," + std::to_string(v) +
                             "} joins two vertices of the same class");
    }
    f.source_vertex.resize(std::size_t(order));
    for (int v = 0; v < order; ++v)
        f.source_vertex[std::size_t(v)] = v;
    return f;
}

LevelForest make_forest_from_roots(int order, const std::vector<VertexPair>& edges, const std::vector<int>& roots)
{
    auto adj = forest_adjacency(order, edges);
    std::vector<int> dist(std::size_t(order), -1);
    std::deque<int> queue;
    for (int x : roots) {
        if (x < 0 || x >= order)
            throw InputError("forest root out of range");
        if (dist[std::size_t(x)] == 0)
            throw InputError("repeated forest root");
        dist[std::size_t(x)] = 0;
        queue.push_back(x);
    }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int w : adj[std::size_t(v)]) {
            if (dist[std::size_t(w)] < 0) {
                dist[std::size_t(w)] = dist[std::size_t(v)] + 1;
                queue.push_back(w);
            }
        }
    }
    std::vector<VertexRole> roles(static_cast<std::size_t>(order));
    for (int v = 0; v < order; ++v) {
        const int d = dist[std::size_t(v)];
        if (d < 0)
            throw InputError("forest vertex " + std::to_string(v) + " is not connected to a root");
        roles[std::size_t(v)] = d == 0 ? VertexRole::Root : (d % 2 == 1 ? VertexRole::Primary : VertexRole::Secondary);
    }
    LevelForest f;
    f.order = order;
    f.adjacency = std::move(adj);
    f.role = std::move(roles);
    f.source_vertex.resize(std::size_t(order));
    for (int v = 0; v < order; ++v)
        f.source_vertex[std::size_t(v)] = v;
    return f;
}

LevelForest level_forest(const RootedTree& t, const std::vector<int>& level)
{
    std::vector<int> local(std::size_t(t.order()), -1);
    for (int i = 0; i < int(level.size()); ++i) {
        const int v = level[std::size_t(i)];
        if (v < 0 || v >= t.order() || local[std::size_t(v)] >= 0)
            throw InputError("level vertex list invalid");
        local[std::size_t(v)] = i;
    }
    std::vector<VertexPair> edges;
    std::vector<int> roots;
    for (int i = 0; i < int(level.size()); ++i) {
        const int v = level[std::size_t(i)];
        const int p = t.parent(v);
        if (p >= 0 && local[std::size_t(p)] >= 0)
            edges.emplace_back(i, local[std::size_t(p)]);
        else
            roots.push_back(i);
    }
    LevelForest f = make_forest_from_roots(int(level.size()), edges, roots);
    f.source_vertex = level;
    return f;
}

Bipartition bipartition_primary_secondary(const LevelForest& f)
{
    Bipartition out;
    for (int v = 0; v < f.order; ++v) {
        if (f.role[std::size_t(v)] == VertexRole::Primary)
            out.primary.push_back(v);
        else if (f.role[std::size_t(v)] == VertexRole::Secondary)
            out.secondary.push_back(v);
    }
    return out;
}

} // namespace treepack
