#include "support.hpp"

#include "treepack/error.hpp"
#include "treepack/graph.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace treepack;

namespace {

HostGraph cycle5()
{
    const std::vector<VertexPair> e{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}};
    return HostGraph::from_edges(5, e);
}

// Neighbourhood intersection by adjacency lists, independent of the bit rows.
std::vector<int> naive_common(const HostGraph& g, const std::vector<int>& vs)
{
    std::vector<int> out;
    for (int u = 0; u < g.order(); ++u) {
        bool all = true;
        for (int v : vs)
            all = all && u != v && g.has_edge(u, v);
        if (all)
            out.push_back(u);
    }
    return out;
}

} // namespace

TEST(Codegree, CompleteGraphPair)
{
    const std::vector<int> vs{0, 1};
    EXPECT_EQ(codegree(HostGraph::complete(4), vs), 2);
}

TEST(Codegree, EmptyGraph)
{
    const std::vector<int> vs{2};
    EXPECT_EQ(codegree(HostGraph::empty(5), vs), 0);
}

TEST(Codegree, FiveCycleAdjacentPair)
{
    const std::vector<int> vs{0, 1};
    EXPECT_EQ(codegree(cycle5(), vs), 0);
}

TEST(Codegree, RejectsBadTuples)
{
    const HostGraph g = HostGraph::complete(4);
    const std::vector<int> out_of_range{0, 4};
    const std::vector<int> repeated{1, 1};
    const std::vector<int> empty;
    EXPECT_THROW(codegree(g, out_of_range), InputError);
    EXPECT_THROW(codegree(g, repeated), InputError);
    EXPECT_THROW(codegree(g, empty), InputError);
}

TEST(CommonNeighbourhood, Examples)
{
    EXPECT_EQ(common_neighbourhood(HostGraph::complete(4), std::vector<int>{0, 1}), (std::vector<int>{2, 3}));
    const std::vector<VertexPair> star{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
    EXPECT_EQ(common_neighbourhood(HostGraph::from_edges(5, star), std::vector<int>{1, 2}), (std::vector<int>{0}));
    EXPECT_EQ(common_neighbourhood(cycle5(), std::vector<int>{0, 2}), (std::vector<int>{1}));
}

TEST(CommonNeighbourhood, MatchesNaiveOnRandomGraphs)
{
    Engine rng = make_engine(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 3 + int(uniform_below(rng, 130));
        const HostGraph g = fixtures::random_graph(m, 0.6, derive_seed(11, {std::uint64_t(trial)}));
        std::vector<int> vs;
        const int k = 1 + int(uniform_below(rng, 3));
        while (int(vs.size()) < k) {
            const int v = int(uniform_below(rng, std::uint64_t(m)));
            if (std::find(vs.begin(), vs.end(), v) == vs.end())
                vs.push_back(v);
        }
        const auto expect = naive_common(g, vs);
        EXPECT_EQ(common_neighbourhood(g, vs), expect);
        EXPECT_EQ(codegree(g, vs), int(expect.size()));
    }
}

TEST(GammaBad, Examples)
{
    const HostGraph k100 = HostGraph::complete(100);
    const std::vector<int> pair{3, 7};
    EXPECT_FALSE(is_gamma_bad(k100, 1.0, 0.5, pair));
    EXPECT_TRUE(is_gamma_bad(k100, 1.0, 0.001, pair));
    EXPECT_TRUE(is_gamma_bad(cycle5(), 0.5, 0.1, std::vector<int>{0, 1}));
}

TEST(GammaBad, ClosedIntervalIsGood)
{
    // codeg 98 against d^2 m (1 - gamma) = 98 exactly.
    EXPECT_FALSE(outside_band(98, 1.0, 0.02, 2, 100));
    EXPECT_TRUE(outside_band(97, 1.0, 0.02, 2, 100));
    EXPECT_FALSE(outside_band(102, 1.0, 0.02, 2, 100));
    EXPECT_TRUE(outside_band(103, 1.0, 0.02, 2, 100));
}

TEST(RemoveEdges, Examples)
{
    HostGraph g = HostGraph::complete(4);
    const std::vector<VertexPair> one{{0, 1}};
    remove_edges(g, one);
    EXPECT_EQ(g.edge_count(), 5);
    EXPECT_FALSE(g.has_edge(1, 0));
    try {
        remove_edges(g, one);
        FAIL() << "expected DoubleUseError";
    } catch (const DoubleUseError& e) {
        EXPECT_EQ(e.pair(), (std::pair<int, int>{0, 1}));
    }
    HostGraph h = HostGraph::complete(4);
    const auto all = h.edges();
    remove_edges(h, all);
    EXPECT_EQ(h, HostGraph::empty(4));
}

TEST(RemoveEdges, AtomicOnDuplicateInBatch)
{
    HostGraph g = HostGraph::complete(5);
    const std::vector<VertexPair> dup{{0, 1}, {2, 3}, {1, 0}};
    EXPECT_THROW(remove_edges(g, dup), DoubleUseError);
    EXPECT_EQ(g, HostGraph::complete(5));
}

TEST(Subsets, EdgeIdentityOnRandomSubsets)
{
    Engine rng = make_engine(13);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 2 + int(uniform_below(rng, 150));
        const HostGraph g = fixtures::random_graph(m, 0.5, derive_seed(13, {std::uint64_t(trial)}));
        std::vector<int> a, b, uni, inter, a_minus, b_minus;
        for (int v = 0; v < m; ++v) {
            const bool in_a = uniform_below(rng, 2) != 0;
            const bool in_b = uniform_below(rng, 2) != 0;
            if (in_a)
                a.push_back(v);
            if (in_b)
                b.push_back(v);
            if (in_a || in_b)
                uni.push_back(v);
            if (in_a && in_b)
                inter.push_back(v);
            if (in_a && !in_b)
                a_minus.push_back(v);
            if (in_b && !in_a)
                b_minus.push_back(v);
        }
        auto e = [&](const std::vector<int>& s) { return edges_within(g, subset_mask(g, s)); };
        const std::int64_t lhs = edges_between(g, subset_mask(g, a), subset_mask(g, b));
        EXPECT_EQ(lhs, e(uni) + e(inter) - e(a_minus) - e(b_minus));

        std::int64_t direct = 0;
        for (int u : a)
            for (int v : b)
                direct += g.has_edge(u, v);
        EXPECT_EQ(lhs, direct);
    }
}

TEST(Induced, MapsBackToParent)
{
    const HostGraph g = fixtures::random_graph(40, 0.5, 17);
    const std::vector<int> keep{1, 5, 9, 20, 33};
    const InducedSubgraph sub = induced_subgraph(g, keep);
    EXPECT_EQ(sub.to_parent, keep);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            if (i != j) {
                EXPECT_EQ(sub.graph.has_edge(i, j), g.has_edge(keep[std::size_t(i)], keep[std::size_t(j)]));
            }
        }
}

TEST(EdgeList, RoundTrip)
{
    const HostGraph g = fixtures::random_graph(70, 0.3, 19);
    std::stringstream ss;
    write_edge_list(ss, g);
    EXPECT_EQ(read_edge_list(ss), g);
}

TEST(EdgeList, RejectsMalformed)
{
    std::istringstream no_header("0 1\n");
    EXPECT_THROW(read_edge_list(no_header), InputError);
    std::istringstream loop("m=3\n1 1\n");
    EXPECT_THROW(read_edge_list(loop), InputError);
}

TEST(Density, Values)
{
    EXPECT_DOUBLE_EQ(HostGraph::complete(10).density(), 1.0);
    EXPECT_DOUBLE_EQ(HostGraph::empty(1).density(), 0.0);
    EXPECT_DOUBLE_EQ(cycle5().density(), 0.5);
}
