#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace treepack {

using Word = std::uint64_t;
using VertexPair = std::pair<int, int>;

inline constexpr int kWordBits = 64;

inline int words_for(int bits) { return (bits + kWordBits - 1) / kWordBits; }

inline VertexPair ordered_pair(int u, int v) { return u < v ? VertexPair{u, v} : VertexPair{v, u}; }

/// Dense simple graph stored as a symmetric bit matrix, one row of
/// ceil(m/64) words per vertex. Queries are const and may run concurrently;
/// mutation requires exclusive access.
class HostGraph {
public:
    HostGraph() = default;
    explicit HostGraph(int order);

    static HostGraph complete(int order);
    static HostGraph empty(int order) { return HostGraph(order); }
    static HostGraph from_edges(int order, std::span<const VertexPair> edges);

    int order() const { return order_; }
    std::int64_t edge_count() const { return edge_count_; }
    int row_words() const { return words_; }

    /// |E| / C(m,2); zero for graphs with fewer than two vertices.
    double density() const;

    bool has_edge(int u, int v) const
    {
        return (row(u)[v / kWordBits] >> (v % kWordBits)) & 1U;
    }

    std::span<const Word> row(int v) const
    {
        return {bits_.data() + std::size_t(v) * std::size_t(words_), std::size_t(words_)};
    }

    int degree(int v) const;

    /// Inserts {u,v}; returns false if it was already present.
    bool add_edge(int u, int v);

    std::vector<VertexPair> edges() const;

    bool operator==(const HostGraph& other) const = default;

private:
    friend HostGraph& remove_edges(HostGraph& g, std::span<const VertexPair> edges);

    void set_bit(int u, int v, bool value);

    int order_ = 0;
    int words_ = 0;
    std::int64_t edge_count_ = 0;
    std::vector<Word> bits_;
};

/// Induced subgraph together with the map from its vertices back to the
/// parent graph's indices (ascending).
struct InducedSubgraph {
    HostGraph graph;
    std::vector<int> to_parent;
};

InducedSubgraph induced_subgraph(const HostGraph& g, std::span<const int> vertices);

/// |N(v1..vk)|. Throws InputError for empty, out-of-range or repeated vertices.
int codegree(const HostGraph& g, std::span<const int> vs);

/// N(v1..vk) in ascending index order.
std::vector<int> common_neighbourhood(const HostGraph& g, std::span<const int> vs);

/// True iff |N(vs)| lies outside the closed interval (1 +- gamma) d^p m, p = |vs|.
bool is_gamma_bad(const HostGraph& g, double density, double gamma, std::span<const int> vs);

/// Same test on a precomputed codegree.
bool outside_band(std::int64_t codeg, double density, double gamma, int p, int order);

/// Removes every listed pair. Fails atomically with DoubleUseError when a
/// pair is absent or listed twice; the graph is untouched in that case.
HostGraph& remove_edges(HostGraph& g, std::span<const VertexPair> edges);

// Kernels on vertex subsets given as bit masks of row_words() words.

std::vector<Word> subset_mask(const HostGraph& g, std::span<const int> vertices);

/// e(B): edges with both ends in B.
std::int64_t edges_within(const HostGraph& g, std::span<const Word> mask);

/// e(A,B): ordered pairs (a,b) in A x B with ab an edge.
std::int64_t edges_between(const HostGraph& g, std::span<const Word> a, std::span<const Word> b);

// Edge-list text format: header "m=<count>", then one "u v" pair per line.

void write_edge_list(std::ostream& out, const HostGraph& g);
HostGraph read_edge_list(std::istream& in);

} // namespace treepack
