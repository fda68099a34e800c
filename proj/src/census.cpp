#include "treepack/census.hpp"

#include "treepack/error.hpp"

#include <algorithm>
#include <tuple>

namespace treepack {

CollisionCensus census_collisions(std::span<const PartialEmbedding> embs, std::span<const LevelForest> forests,
                                  int host_order)
{
    if (embs.size() != forests.size())
        throw InputError("census needs one embedding per forest");
    const int k = int(embs.size());
    CollisionCensus c;
    c.vc.resize(std::size_t(k));
    c.ec.resize(std::size_t(k));
    c.fn.resize(std::size_t(host_order));
    c.yn.resize(std::size_t(host_order));
    c.xn.resize(std::size_t(host_order));

    struct Use {
        VertexPair pair;
        int forest;
        int a;
        int b;
    };
    std::vector<Use> uses;
    for (int f = 0; f < k; ++f) {
        const auto& h = embs[std::size_t(f)];
        const auto& F = forests[std::size_t(f)];
        if (int(h.assignment.size()) != F.order)
            throw InputError("embedding size differs from its forest");
        c.vc[std::size_t(f)] = vertex_collisions(h);
        for (int x = 0; x < F.order; ++x) {
            const int hx = h.assignment[std::size_t(x)];
            if (hx >= host_order)
                throw InputError("embedding image outside the host");
            if (hx < 0)
                continue;
            for (int y : F.adjacency[std::size_t(x)]) {
                const int hy = h.assignment[std::size_t(y)];
                if (x < y && hy >= 0)
                    uses.push_back({ordered_pair(hx, hy), f, x, y});
            }
        }
    }
    std::sort(uses.begin(), uses.end(), [](const Use& a, const Use& b) {
        return std::tie(a.pair, a.forest, a.a, a.b) < std::tie(b.pair, b.forest, b.a, b.b);
    });

    for (std::size_t i = 0; i < uses.size();) {
        std::size_t j = i;
        while (j < uses.size() && uses[j].pair == uses[i].pair)
            ++j;
        c.used_pairs.push_back(uses[i].pair);
        c.pair_multiplicity.push_back(int(j - i));
        const bool shared = uses[i].forest != uses[j - 1].forest;
        if (shared) {
            ++c.multiply_used_pairs;
            for (std::size_t t = i; t < j; ++t) {
                c.ec[std::size_t(uses[t].forest)].push_back(uses[t].a);
                c.ec[std::size_t(uses[t].forest)].push_back(uses[t].b);
            }
        }
        i = j;
    }
    for (auto& e : c.ec) {
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
    }

    for (int f = 0; f < k; ++f) {
        const auto& h = embs[std::size_t(f)];
        const auto& F = forests[std::size_t(f)];
        std::vector<char> faulty(std::size_t(F.order), 0);
        for (int v : c.vc[std::size_t(f)])
            faulty[std::size_t(v)] = 1;
        for (int v : c.ec[std::size_t(f)])
            faulty[std::size_t(v)] = 1;
        for (int x = 0; x < F.order; ++x) {
            const int hx = h.assignment[std::size_t(x)];
            if (hx < 0)
                continue;
            bool has_faulty = false, has_skipped = false, has_root = false;
            for (int y : F.adjacency[std::size_t(x)]) {
                has_faulty |= faulty[std::size_t(y)] != 0;
                has_skipped |= h.assignment[std::size_t(y)] == kSkipped;
                has_root |= F.role[std::size_t(y)] == VertexRole::Root;
            }
            if (has_faulty)
                c.fn[std::size_t(hx)].push_back({f, x});
            if (has_skipped)
                c.yn[std::size_t(hx)].push_back({f, x});
            if (has_root)
                c.xn[std::size_t(hx)].push_back({f, x});
        }
    }
    return c;
}

} // namespace treepack
