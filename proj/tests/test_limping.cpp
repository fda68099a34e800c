#include "support.hpp"

#include "treepack/error.hpp"
#include "treepack/limping.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace treepack;

namespace {

LimpingConfig config_for(const HostGraph& g, const LevelForest& f, double alpha, std::uint64_t seed)
{
    LimpingConfig cfg;
    cfg.alpha = alpha;
    cfg.density = g.density();
    cfg.host = &g;
    cfg.forest = &f;
    cfg.seed = seed;
    return cfg;
}

void expect_homomorphism(const HostGraph& g, const LevelForest& f, const PartialEmbedding& h)
{
    for (auto [a, b] : f.edges()) {
        const int ha = h.assignment[std::size_t(a)], hb = h.assignment[std::size_t(b)];
        if (ha >= 0 && hb >= 0) {
            ASSERT_TRUE(g.has_edge(ha, hb)) << a << "-" << b;
        }
    }
    for (int y : h.skipped)
        ASSERT_EQ(f.role[std::size_t(y)], VertexRole::Secondary);
    for (int x : f.roots())
        ASSERT_EQ(h.assignment[std::size_t(x)], kUnmapped);
}

const LevelForest& single_edge()
{
    static const LevelForest f = make_forest(2, {{0, 1}}, {VertexRole::Primary, VertexRole::Secondary});
    return f;
}

} // namespace

TEST(Limping, PrimaryUniformChiSquare)
{
    const HostGraph k10 = HostGraph::complete(10);
    std::vector<double> counts(10, 0.0);
    const std::uint64_t trials = 100000;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const PartialEmbedding h = sample_limping(config_for(k10, single_edge(), 0.2, derive_seed(61, {t})));
        if (t % 97 == 0)
            expect_homomorphism(k10, single_edge(), h);
        counts[std::size_t(h.assignment[0])] += 1.0;
        EXPECT_NE(h.assignment[1], kSkipped);
    }
    double chi2 = 0.0;
    for (double c : counts)
        chi2 += (c - 1e4) * (c - 1e4) / 1e4;
    EXPECT_LE(chi2, chi_square_critical_1e3(9));
}

TEST(Limping, ChiSquareCriticalValue)
{
    // Tabulated upper 0.001 points: df=9 -> 27.877, df=99 -> 148.23.
    EXPECT_NEAR(chi_square_critical_1e3(9), 27.877, 0.3);
    EXPECT_NEAR(chi_square_critical_1e3(99), 148.23, 0.5);
}

TEST(Limping, PathMiddlePlacementProbability)
{
    // x - y - z with y secondary. On K_m, P[h(x)=u, h(y)=v] = (1 + 1/(m-1)) / m^2.
    const HostGraph k10 = HostGraph::complete(10);
    const LevelForest f =
        make_forest(3, {{0, 1}, {1, 2}}, {VertexRole::Primary, VertexRole::Secondary, VertexRole::Primary});
    const std::uint64_t trials = 100000;
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const PartialEmbedding h = sample_limping(config_for(k10, f, 0.2, derive_seed(67, {t})));
        ASSERT_NE(h.assignment[1], kSkipped);
        hits += h.assignment[0] == 3 && h.assignment[1] == 4;
    }
    const double p = (1.0 + 1.0 / 9.0) / 100.0;
    const double est = double(hits) / double(trials);
    EXPECT_NEAR(est, p, 3.0 * std::sqrt(p * (1 - p) / double(trials)));
    const double a = 0.2 * std::pow(2.0, 2);
    EXPECT_GE(est, std::pow(1 - a, 4) / 100.0);
    EXPECT_LE(est, std::pow(1 + a, 4) / 100.0);
}

TEST(Limping, SecondaryConditionallyUniform)
{
    const HostGraph g = fixtures::random_graph(60, 0.7, 71);
    const LevelForest f =
        make_forest(3, {{0, 1}, {1, 2}}, {VertexRole::Primary, VertexRole::Secondary, VertexRole::Primary});
    const std::vector<int> primaries{4, -1, 9};
    const std::vector<int> both{4, 9};
    const auto nbhd = common_neighbourhood(g, both);
    ASSERT_GT(nbhd.size(), 10U);
    const double alpha = 0.24;
    ASSERT_FALSE(is_gamma_bad(g, g.density(), alpha, both));
    std::vector<double> counts(60, 0.0);
    const int trials = 40000;
    for (int t = 0; t < trials; ++t) {
        const PartialEmbedding h = sample_secondaries(config_for(g, f, alpha, derive_seed(71, {std::uint64_t(t)})), primaries);
        ASSERT_EQ(h.assignment[0], 4);
        ASSERT_EQ(h.assignment[2], 9);
        const int y = h.assignment[1];
        ASSERT_TRUE(std::binary_search(nbhd.begin(), nbhd.end(), y));
        counts[std::size_t(y)] += 1.0;
    }
    const double expect = double(trials) / double(nbhd.size());
    double chi2 = 0.0;
    for (int v : nbhd)
        chi2 += (counts[std::size_t(v)] - expect) * (counts[std::size_t(v)] - expect) / expect;
    EXPECT_LE(chi2, chi_square_critical_1e3(int(nbhd.size()) - 1));
}

TEST(Limping, BadNeighbourhoodSkips)
{
    // Both primaries on the same vertex of a star host: the common
    // neighbourhood of {centre} is fine, of a leaf is tiny and bad.
    HostGraph g = HostGraph::complete(20);
    std::vector<VertexPair> cut;
    for (int v = 2; v < 20; ++v)
        cut.emplace_back(1, v);
    remove_edges(g, cut);
    const LevelForest& f = single_edge();
    const PartialEmbedding h = sample_secondaries(config_for(g, f, 0.1, 5), {1, -1});
    EXPECT_EQ(h.assignment[1], kSkipped);
    EXPECT_EQ(h.skipped, (std::vector<int>{1}));
    EXPECT_EQ(h.image_vertices, (std::vector<int>{1}));
    EXPECT_TRUE(h.image_edges.empty());
}

TEST(Limping, DeterministicUnderSeed)
{
    const HostGraph g = fixtures::random_graph(80, 0.8, 73);
    const RootedTree t = random_bounded_degree_tree(40, 3, 73);
    const LevelForest f = level_forest(t, cut_into_levels(t, 1, 1.0).levels[0]);
    const auto a = sample_limping(config_for(g, f, 0.2, 99));
    const auto b = sample_limping(config_for(g, f, 0.2, 99));
    EXPECT_EQ(a, b);
    expect_homomorphism(g, f, a);
}

TEST(Limping, NoSkipsInLargeCompleteHosts)
{
    // Codegrees on K_m are m - p; they stay in the band once alpha >= delta/m.
    const HostGraph k100 = HostGraph::complete(100);
    for (int i = 0; i < 50; ++i) {
        const RootedTree t = random_bounded_degree_tree(30, 3, derive_seed(79, {std::uint64_t(i)}));
        const LevelForest f = level_forest(t, cut_into_levels(t, 1, 1.0).levels[0]);
        const auto h = sample_limping(config_for(k100, f, 0.05, derive_seed(79, {std::uint64_t(i), 1})));
        EXPECT_TRUE(h.skipped.empty());
        expect_homomorphism(k100, f, h);
    }
}

TEST(Limping, TupleCap)
{
    EXPECT_EQ(secondary_tuple_cap(single_edge()), 1);
    const LevelForest f =
        make_forest(3, {{0, 1}, {1, 2}}, {VertexRole::Primary, VertexRole::Secondary, VertexRole::Primary});
    EXPECT_EQ(secondary_tuple_cap(f), 2);
    const LevelForest rooted = make_forest(3, {{0, 1}, {1, 2}}, {VertexRole::Root, VertexRole::Primary, VertexRole::Secondary});
    EXPECT_EQ(secondary_tuple_cap(rooted), 1);
}

TEST(Limping, VertexCollisionsListsSharers)
{
    PartialEmbedding h;
    h.assignment = {5, 2, 5, kUnmapped, 2, 7, kSkipped};
    EXPECT_EQ(vertex_collisions(h), (std::vector<int>{0, 1, 2, 4}));
}

TEST(Limping, RejectsBadConfig)
{
    LimpingConfig cfg;
    EXPECT_THROW(sample_limping(cfg), InputError);
    const HostGraph k10 = HostGraph::complete(10);
    EXPECT_THROW(sample_limping(config_for(k10, single_edge(), 0.0, 1)), InputError);
}

TEST(LemmaBounds, SingleEdgeFixture)
{
    const HostGraph k10 = HostGraph::complete(10);
    const DistributionReport rep = estimate_lemma_bounds(config_for(k10, single_edge(), 0.15, 83), 20000);
    EXPECT_TRUE(rep.all_pass()) << rep.to_json();
    const Claim* vc = rep.find("mean_vertex_collisions");
    ASSERT_NE(vc, nullptr);
    EXPECT_EQ(vc->estimate, 0.0);
    const Claim* skip = rep.find("skip_probability");
    ASSERT_NE(skip, nullptr);
    EXPECT_EQ(skip->estimate, 0.0);
}

TEST(LemmaBounds, PathIntoK100)
{
    const HostGraph k100 = HostGraph::complete(100);
    const LevelForest f = make_forest_from_roots(11, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {8, 9}, {9, 10}}, {0});
    const DistributionReport rep = estimate_lemma_bounds(config_for(k100, f, 0.05, 89), 5000);
    EXPECT_TRUE(rep.all_pass()) << rep.to_json();
    const Claim* vc = rep.find("mean_vertex_collisions");
    ASSERT_NE(vc, nullptr);
    EXPECT_DOUBLE_EQ(vc->bound, 2.0);
}

TEST(LemmaBounds, RejectsTooFewTrials)
{
    const HostGraph k10 = HostGraph::complete(10);
    EXPECT_THROW(estimate_lemma_bounds(config_for(k10, single_edge(), 0.15, 1), 999), InputError);
}
