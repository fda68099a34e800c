#pragma once

#include "treepack/limping.hpp"
#include "treepack/tree.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace treepack {

/// A forest vertex named by (forest index, local vertex).
struct ForestVertex {
    int forest = 0;
    int vertex = 0;

    auto operator<=>(const ForestVertex&) const = default;
};

struct CollisionCensus {
    std::vector<std::vector<int>> vc; ///< per forest, ascending
    std::vector<std::vector<int>> ec; ///< per forest, ascending
    /// Per host vertex: forest vertices mapped there with a faulty, skipped or
    /// root neighbour in their own forest.
    std::vector<std::vector<ForestVertex>> fn;
    std::vector<std::vector<ForestVertex>> yn;
    std::vector<std::vector<ForestVertex>> xn;

    std::vector<VertexPair> used_pairs;       ///< distinct, ascending
    std::vector<int> pair_multiplicity;       ///< parallel to used_pairs, counted over forests
    std::int64_t multiply_used_pairs = 0;     ///< pairs used by >= 2 distinct forests
};

/// Collision census over embeddings that all target hosts of order
/// `host_order` (assignments already expressed in host indices).
CollisionCensus census_collisions(std::span<const PartialEmbedding> embs, std::span<const LevelForest> forests,
                                  int host_order);

} // namespace treepack
