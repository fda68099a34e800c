#pragma once

#include "treepack/correction.hpp"
#include "treepack/graph.hpp"
#include "treepack/rng.hpp"
#include "treepack/tree.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace treepack::fixtures {

struct SyntheticAlmostPacking {
    AlmostPacking ap;
    std::vector<RootedTree> trees;
};

/// Random trees placed one by one into K_m by rejection: injective per tree,
/// edge-disjoint overall, |R_i| = ell (R_i avoids vertex 0) and at most ell
/// neighbours of exception vertices on any host vertex. Throws when the hit
/// budget m * ell cannot absorb the requested trees.
inline SyntheticAlmostPacking synthetic_almost_packing(int m, int trees, int min_order, int max_order, int delta,
                                                       int ell, std::uint64_t seed)
{
    SyntheticAlmostPacking out;
    out.ap.m = m;
    Engine rng = make_engine(seed);
    std::unordered_set<std::uint64_t> used;
    std::vector<int> hits(std::size_t(m), 0);
    auto key = [m](int a, int b) { return std::uint64_t(std::min(a, b)) * std::uint64_t(m) + std::uint64_t(std::max(a, b)); };

    for (int i = 0; i < trees; ++i) {
        const int order = min_order + int(uniform_below(rng, std::uint64_t(max_order - min_order + 1)));
        for (std::uint64_t attempt = 0;; ++attempt) {
            const RootedTree t = random_bounded_degree_tree(order, delta, derive_seed(seed, {std::uint64_t(i), attempt}));
            std::vector<char> in_r(std::size_t(order), 0);
            const int r_size = std::min(ell, order - 1);
            for (int placed = 0; placed < r_size;) {
                const int x = 1 + int(uniform_below(rng, std::uint64_t(order - 1)));
                if (!in_r[std::size_t(x)]) {
                    in_r[std::size_t(x)] = 1;
                    ++placed;
                }
            }
            const auto adj = t.adjacency();
            std::vector<int> map(std::size_t(order), kExcepted);
            std::vector<char> mine(std::size_t(m), 0);
            std::vector<std::uint64_t> new_edges;
            std::vector<int> new_hits;
            bool ok = true;
            for (int x : t.preorder()) {
                if (in_r[std::size_t(x)])
                    continue;
                bool needs_hit = false;
                for (int y : adj[std::size_t(x)])
                    needs_hit = needs_hit || in_r[std::size_t(y)];
                const int p = t.parent(x);
                const bool parent_mapped = p >= 0 && !in_r[std::size_t(p)];
                int pick = -1;
                for (int tries = 0; tries < 2000 && pick < 0; ++tries) {
                    const int v = int(uniform_below(rng, std::uint64_t(m)));
                    if (mine[std::size_t(v)] || (needs_hit && hits[std::size_t(v)] >= ell))
                        continue;
                    if (parent_mapped && used.count(key(map[std::size_t(p)], v)))
                        continue;
                    pick = v;
                }
                if (pick < 0) {
                    ok = false;
                    break;
                }
                map[std::size_t(x)] = pick;
                mine[std::size_t(pick)] = 1;
                if (needs_hit) {
                    ++hits[std::size_t(pick)];
                    new_hits.push_back(pick);
                }
                if (parent_mapped) {
                    used.insert(key(map[std::size_t(p)], pick));
                    new_edges.push_back(key(map[std::size_t(p)], pick));
                }
            }
            if (ok) {
                std::vector<int> r;
                for (int x = 0; x < order; ++x)
                    if (in_r[std::size_t(x)])
                        r.push_back(x);
                out.trees.push_back(t);
                out.ap.maps.push_back(std::move(map));
                out.ap.exceptions.push_back(std::move(r));
                break;
            }
            for (auto e : new_edges)
                used.erase(e);
            for (int v : new_hits)
                --hits[std::size_t(v)];
            if (attempt >= 200)
                throw std::runtime_error("synthetic almost-packing: hit budget exhausted");
        }
    }
    return out;
}

/// G(m, p) with a fixed seed.
inline HostGraph random_graph(int m, double p, std::uint64_t seed)
{
    HostGraph g = HostGraph::empty(m);
    Engine rng = make_engine(seed);
    for (int u = 0; u < m; ++u)
        for (int v = u + 1; v < m; ++v)
            if (uniform_unit(rng) < p)
                g.add_edge(u, v);
    return g;
}

} // namespace treepack::fixtures
