#include "support.hpp"

#include "treepack/census.hpp"
#include "treepack/error.hpp"
#include "treepack/load.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace treepack;

namespace {

PartialEmbedding embedding(std::vector<int> assignment)
{
    PartialEmbedding h;
    h.assignment = std::move(assignment);
    return h;
}

LevelForest edge_forest()
{
    return make_forest(2, {{0, 1}}, {VertexRole::Primary, VertexRole::Secondary});
}

bool contains(const std::vector<ForestVertex>& v, ForestVertex x)
{
    return std::find(v.begin(), v.end(), x) != v.end();
}

} // namespace

TEST(Census, DisjointEdgesAreClean)
{
    const std::vector<LevelForest> forests{edge_forest(), edge_forest()};
    const std::vector<PartialEmbedding> embs{embedding({0, 1}), embedding({2, 3})};
    const CollisionCensus c = census_collisions(embs, forests, 4);
    for (int f = 0; f < 2; ++f) {
        EXPECT_TRUE(c.vc[std::size_t(f)].empty());
        EXPECT_TRUE(c.ec[std::size_t(f)].empty());
    }
    for (int v = 0; v < 4; ++v) {
        EXPECT_TRUE(c.fn[std::size_t(v)].empty());
        EXPECT_TRUE(c.yn[std::size_t(v)].empty());
        EXPECT_TRUE(c.xn[std::size_t(v)].empty());
    }
    EXPECT_EQ(c.used_pairs.size(), 2U);
    EXPECT_EQ(c.multiply_used_pairs, 0);
}

TEST(Census, SharedPairIsAnEdgeCollision)
{
    const std::vector<LevelForest> forests{edge_forest(), edge_forest()};
    const std::vector<PartialEmbedding> embs{embedding({0, 1}), embedding({1, 0})};
    const CollisionCensus c = census_collisions(embs, forests, 4);
    EXPECT_EQ(c.ec[0], (std::vector<int>{0, 1}));
    EXPECT_EQ(c.ec[1], (std::vector<int>{0, 1}));
    EXPECT_EQ(c.used_pairs, (std::vector<VertexPair>{{0, 1}}));
    EXPECT_EQ(c.pair_multiplicity, (std::vector<int>{2}));
    EXPECT_EQ(c.multiply_used_pairs, 1);
    // Every vertex has its faulty partner as neighbour.
    EXPECT_TRUE(contains(c.fn[0], {0, 0}));
    EXPECT_TRUE(contains(c.fn[0], {1, 1}));
    EXPECT_TRUE(contains(c.fn[1], {0, 1}));
    EXPECT_TRUE(contains(c.fn[1], {1, 0}));
}

TEST(Census, SelfCollisionInAPath)
{
    const std::vector<LevelForest> forests{
        make_forest(3, {{0, 1}, {1, 2}}, {VertexRole::Primary, VertexRole::Secondary, VertexRole::Primary})};
    const std::vector<PartialEmbedding> embs{embedding({2, 5, 2})};
    const CollisionCensus c = census_collisions(embs, forests, 6);
    EXPECT_EQ(c.vc[0], (std::vector<int>{0, 2}));
    EXPECT_TRUE(contains(c.fn[5], {0, 1}));
    // Both edges map to {2,5}; a pair reused inside one forest is not an edge collision.
    EXPECT_TRUE(c.ec[0].empty());
    EXPECT_EQ(c.pair_multiplicity, (std::vector<int>{2}));
    EXPECT_EQ(c.multiply_used_pairs, 0);
}

TEST(Census, SkippedAndRootNeighbours)
{
    const std::vector<LevelForest> forests{
        make_forest(3, {{0, 1}, {1, 2}}, {VertexRole::Root, VertexRole::Primary, VertexRole::Secondary})};
    const std::vector<PartialEmbedding> embs{embedding({kUnmapped, 3, kSkipped})};
    const CollisionCensus c = census_collisions(embs, forests, 5);
    EXPECT_TRUE(contains(c.yn[3], {0, 1}));
    EXPECT_TRUE(contains(c.xn[3], {0, 1}));
    EXPECT_TRUE(c.used_pairs.empty());
}

TEST(Load, SingleSetExample)
{
    const LoadStats s = load_stats(3, {{0}});
    EXPECT_DOUBLE_EQ(s.mu, 2.0 / 3.0);
    // sigma is the sum of squared deviations: 1/9 + 1/9 + 4/9.
    EXPECT_NEAR(s.sigma, 2.0 / 3.0, 1e-15);
    EXPECT_EQ(s.max_size_gap, 0);
    EXPECT_EQ(s.sum_load, 2);
    EXPECT_EQ(s.sum_load_sq, 2);
}

TEST(Load, EmptyFamily)
{
    const LoadStats s = load_stats(5, {});
    EXPECT_EQ(s.mu, 0.0);
    EXPECT_EQ(s.sigma, 0.0);
    EXPECT_EQ(s.max_size_gap, 0);
}

TEST(Load, FullSetsGiveConstantLoad)
{
    const SetFamily fam(4, std::vector<int>{0, 1, 2, 3, 4, 5});
    const LoadStats s = load_stats(6, fam);
    EXPECT_EQ(s.mu, 4.0);
    EXPECT_EQ(s.sigma, 0.0);
}

TEST(Load, RejectsOutOfRange)
{
    EXPECT_THROW(load_stats(3, {{0, 3}}), InputError);
}

TEST(Load, RepeatedVertexCountsOnce)
{
    EXPECT_EQ(load_stats(3, {{0, 0}}).sum_load, load_stats(3, {{0}}).sum_load);
}

TEST(Load, MatchesPairwiseScan)
{
    Engine rng = make_engine(101);
    for (int f = 0; f < 100; ++f) {
        const int m = 2 + int(uniform_below(rng, 60));
        SetFamily fam(uniform_below(rng, 20));
        for (auto& s : fam)
            for (int v = 0; v < m; ++v)
                if (uniform_below(rng, 3) == 0)
                    s.push_back(v);
        std::int64_t s1 = 0, s2 = 0;
        for (int v = 0; v < m; ++v)
            for (int w = v + 1; w < m; ++w) {
                std::int64_t l = 0;
                for (const auto& s : fam)
                    l += std::count(s.begin(), s.end(), v) + std::count(s.begin(), s.end(), w) > 0;
                s1 += l;
                s2 += l * l;
            }
        const LoadStats st = load_stats(m, fam);
        EXPECT_EQ(st.sum_load, s1);
        EXPECT_EQ(st.sum_load_sq, s2);
    }
}

TEST(Typical, EmptyFamilyAllTypical)
{
    const TypicalityReport r = classify_typical({}, 0.01, 10, 10);
    EXPECT_EQ(r.atypical, 0);
    EXPECT_EQ(r.typical.size(), 45U);
}

TEST(Typical, SingleSetWithUnitAlpha)
{
    const TypicalityReport r = classify_typical({{0}}, 1.0, 3, 3);
    EXPECT_EQ(r.atypical, 0);
    EXPECT_DOUBLE_EQ(r.threshold, 9.0);
    EXPECT_TRUE(r.homogeneous_sigma);
}

TEST(Typical, AtypicalCountWithinSigmaBound)
{
    // Chebyshev: sigma <= alpha n^4 gives at most sqrt(alpha) n^2 atypical pairs.
    Engine rng = make_engine(103);
    for (int f = 0; f < 50; ++f) {
        const int m = 40;
        SetFamily fam(30);
        for (auto& s : fam)
            for (int v = 0; v < m; ++v)
                if (uniform_below(rng, 2) == 0)
                    s.push_back(v);
        const LoadStats st = load_stats(m, fam);
        const int n = 40;
        const double alpha = std::max(1e-9, st.sigma / std::pow(double(n), 4)) * (1.0 + 1e-9);
        const TypicalityReport r = classify_typical(fam, alpha, m, n);
        EXPECT_TRUE(r.homogeneous_sigma);
        EXPECT_LE(double(r.atypical), r.sqrt_alpha_bound + 1e-9);
    }
}

TEST(Typical, PairIndexIsLexicographic)
{
    EXPECT_EQ(pair_index(4, 0, 1), 0);
    EXPECT_EQ(pair_index(4, 0, 3), 2);
    EXPECT_EQ(pair_index(4, 1, 2), 3);
    EXPECT_EQ(pair_index(4, 2, 3), 5);
}

TEST(Typical, ImportantGroups)
{
    // sqrt(0.01) * 100 * 4 / 2 = 20.
    EXPECT_EQ(important_groups({5, 20, 21, 40}, 0.01, 100, 4), (std::vector<int>{2, 3}));
}
