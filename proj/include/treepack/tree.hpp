#pragma once

#include "treepack/graph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace treepack {

/// Rooted tree stored as a parent array; parent[root] == -1.
class RootedTree {
public:
    RootedTree() = default;

    /// Validates that the parent links form a single tree rooted at `root`.
    RootedTree(std::vector<int> parent, int root);

    static RootedTree single_vertex() { return RootedTree({-1}, 0); }
    static RootedTree path(int order);
    static RootedTree star(int order);

    int order() const { return int(parent_.size()); }
    int root() const { return root_; }
    int parent(int v) const { return parent_[std::size_t(v)]; }
    const std::vector<int>& parents() const { return parent_; }
    int max_degree() const { return max_degree_; }
    int degree(int v) const { return degree_[std::size_t(v)]; }
    const std::vector<int>& degrees() const { return degree_; }
    int edge_count() const { return order() - 1; }

    /// Edges as (child, parent) pairs in child index order.
    std::vector<VertexPair> edges() const;

    /// Neighbour lists in ascending order.
    std::vector<std::vector<int>> adjacency() const;

    /// Lowest-indexed vertex of degree <= 1.
    int lowest_leaf() const;

    /// Vertices in preorder (children visited in ascending index order).
    std::vector<int> preorder() const;

    bool operator==(const RootedTree& other) const
    {
        return root_ == other.root_ && parent_ == other.parent_;
    }

private:
    std::vector<int> parent_;
    int root_ = 0;
    std::vector<int> degree_;
    int max_degree_ = 0;
};

struct TreeFamily {
    std::vector<RootedTree> trees;
    int n = 0;
    int delta = 0;
    std::optional<int> exceptional;

    std::int64_t total_edges() const;
};

/// Throws InputError unless every tree has order <= n and degree <= delta.
void check_family_bounds(const TreeFamily& fam);

/// Where an input tree's vertices ended up in a transformed family.
struct TreePlacement {
    int tree = 0;                 ///< index in the transformed family
    std::vector<int> vertex_map;  ///< input vertex -> vertex of that tree
};

struct MergeResult {
    TreeFamily family;
    std::vector<TreePlacement> placements; ///< one per input tree
};

/// Leaf-identifies the two lowest-indexed trees of order <= n/2 until at
/// most one remains. The merged tree replaces the first of the pair and keeps
/// its root; the second is re-rooted at its identified leaf.
MergeResult merge_small_trees_tracked(const TreeFamily& fam);
TreeFamily merge_small_trees(const TreeFamily& fam);

/// Tree padded by a path appended at its lowest-indexed leaf. Padding vertices
/// occupy the suffix [original_order, order), so projecting back onto the
/// source tree is a prefix restriction.
struct PaddedTree {
    RootedTree tree;
    int original_order = 0;
    int source = 0; ///< index in the family passed to group_and_pad
};

struct GroupedFamily {
    int n = 0;
    int delta = 0;
    int c = 0;
    /// endpoints[i] for i = 0..c; group i holds orders in (endpoints[i-1], endpoints[i]].
    std::vector<int> endpoints;
    std::vector<std::vector<PaddedTree>> groups; ///< groups[i-1] is group i
    std::optional<RootedTree> exceptional_tree;
    std::optional<int> exceptional_source;
    std::int64_t added_path_edges = 0;

    std::vector<int> group_sizes() const;
};

/// ceil(50/epsilon), optionally capped.
int group_count(double epsilon, std::optional<int> cap = std::nullopt);

/// Integer endpoint e_i = ceil(n/2 + i*n/(2c)) for i >= 1 and e_0 = floor(n/2).
int group_endpoint(int n, int c, int i);

PaddedTree pad_to_order(const RootedTree& t, int target, int source);

/// Groups the trees of a normalized family by order and pads each to its
/// group's upper endpoint.
GroupedFamily group_and_pad(const TreeFamily& fam, int c);
GroupedFamily group_and_pad(const TreeFamily& fam, double epsilon);

// ---------------------------------------------------------------------------
// Level partitions

struct LevelPartition {
    int r = 0;
    double rho = 0.0;
    std::vector<std::vector<int>> levels;      ///< ascending vertex lists
    std::vector<std::vector<int>> level_roots; ///< tops of the components of T[L^j]
    std::vector<int> level_of;                 ///< vertex -> level index (0-based)
    int cut_components = 0;                    ///< pieces produced by the cutting phase
};

/// The cutting algorithm with its hypotheses v(T) >= 4 delta r / rho and
/// 0 < rho < 1/(4r) enforced (InputError names the failed bound). `delta` is
/// the degree bound the hypotheses are checked against.
LevelPartition balanced_level_partition(const RootedTree& t, int r, double rho, int delta);
LevelPartition balanced_level_partition(const RootedTree& t, int r, double rho);

/// Same algorithm without the size hypotheses; requires 0 < rho < 2 so that
/// every level is non-empty. The balance bound still holds; the component
/// bound may not.
LevelPartition cut_into_levels(const RootedTree& t, int r, double rho);

/// Number of connected components of T[vs].
int induced_component_count(const RootedTree& t, const std::vector<int>& vs);

// ---------------------------------------------------------------------------
// Level forests

enum class VertexRole : std::uint8_t { Root, Primary, Secondary };

/// A forest with local vertex indices, a root set X and the primary/secondary
/// split of the remaining vertices.
struct LevelForest {
    int order = 0;
    std::vector<std::vector<int>> adjacency;
    std::vector<VertexRole> role;
    std::vector<int> source_vertex; ///< local -> vertex of the originating tree (identity for fixtures)

    std::vector<int> roots() const;
    std::vector<VertexPair> edges() const;
};

/// Forest with explicit roles. Throws InputError on malformed edges.
LevelForest make_forest(int order, const std::vector<VertexPair>& edges, std::vector<VertexRole> roles);

/// Roles from parity of distance to `roots`: odd -> primary, even -> secondary.
/// Every component must contain a root.
LevelForest make_forest_from_roots(int order, const std::vector<VertexPair>& edges, const std::vector<int>& roots);

/// T[level] with X = the level roots.
LevelForest level_forest(const RootedTree& t, const std::vector<int>& level);

struct Bipartition {
    std::vector<int> primary;
    std::vector<int> secondary;
};

Bipartition bipartition_primary_secondary(const LevelForest& f);

// ---------------------------------------------------------------------------
// Generators

/// Descriptor syntax: "kind:key=value,...". Kinds:
///   random:n=..,delta=..,count=..|budget=..|budget=full[,min=..,max=..]
///   paths:n=..,count=..|budget=..[,order=..]
///   caterpillars:n=..,delta=..,count=..|budget=..[,order=..]
///   regular:delta=..,depth=..[,copies=..,n=..]
///   ringel:n=..[,shape=path|random,delta=..]
TreeFamily generate_family(const std::string& descriptor, std::uint64_t seed);

/// Random tree by attaching each new vertex to a uniform vertex of degree < delta.
RootedTree random_bounded_degree_tree(int order, int delta, std::uint64_t seed);

/// Full delta-regular tree of the given depth (internal vertices have degree delta).
RootedTree regular_tree(int delta, int depth);

/// Moves the lowest-indexed leaf so that it hangs from the highest-indexed leaf.
RootedTree modify_regular_tree(const RootedTree& t);

struct ModifiedRegular {
    int delta = 3;
    int depth = 2;
};

struct StarFamily {
    int n = 0;
    double epsilon = 0.0;
};

/// Order of each star in the star family: floor((1/2 + 2 sqrt(eps)) n) + 1.
int star_family_order(int n, double epsilon);

TreeFamily generate_counterexample_family(const ModifiedRegular& spec);
TreeFamily generate_counterexample_family(const StarFamily& spec);

} // namespace treepack
