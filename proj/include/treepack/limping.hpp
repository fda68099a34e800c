#pragma once

#include "treepack/graph.hpp"
#include "treepack/tree.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace treepack {

inline constexpr int kSkipped = -1;
inline constexpr int kUnmapped = -2;

struct LimpingConfig {
    double alpha = 0.05;
    double density = 1.0; ///< d used in the badness test
    std::uint64_t seed = 0;
    const HostGraph* host = nullptr;
    const LevelForest* forest = nullptr;
};

/// A partial homomorphism of F - X into the host. Roots are kUnmapped,
/// skipped secondaries kSkipped.
struct PartialEmbedding {
    std::vector<int> assignment;
    std::vector<int> skipped;            ///< Y, ascending
    std::vector<int> image_vertices;     ///< V(h), ascending, distinct
    std::vector<VertexPair> image_edges; ///< one ordered host pair per embedded forest edge

    bool operator==(const PartialEmbedding&) const = default;
};

/// Primaries uniformly over the host, then each secondary uniformly in the
/// common neighbourhood of its (deduplicated) neighbour images unless that
/// set is alpha-bad. One tau is drawn per secondary in index order whether or
/// not it is skipped, so the random stream does not depend on skip outcomes.
PartialEmbedding sample_limping(const LimpingConfig& cfg);

/// Second step only, with the primary images fixed. `primary_images` is
/// indexed by forest vertex; entries for non-primaries are ignored.
PartialEmbedding sample_secondaries(const LimpingConfig& cfg, const std::vector<int>& primary_images);

/// Largest tuple size the badness test can see for this forest: the maximum
/// number of non-root neighbours of a secondary vertex (at least 1).
int secondary_tuple_cap(const LevelForest& f);

/// Forest vertices whose image is shared with another vertex of the same forest.
std::vector<int> vertex_collisions(const PartialEmbedding& h);

struct Claim {
    std::string name;
    double estimate = 0.0;
    std::optional<double> lower; ///< present for two-sided claims
    double bound = 0.0;
    double stderr_ = 0.0;
    bool pass = false;
};

struct DistributionReport {
    std::uint64_t trials = 0;
    int host_order = 0;
    int forest_order = 0;
    double density = 0.0;
    double alpha = 0.0;
    int delta = 0;
    std::vector<Claim> claims;

    bool all_pass() const;
    const Claim* find(const std::string& name) const;
    std::string to_json() const;
};

inline constexpr double kClaimSigmas = 3.0;

/// Monte Carlo checks of the limping-homomorphism lemmas on a small fixture
/// (v(F) <= 100, m <= 500, trials >= 1000).
DistributionReport estimate_lemma_bounds(const LimpingConfig& cfg, std::uint64_t trials);

/// Upper 10^-3 critical value of chi-square with `df` degrees of freedom
/// (Wilson-Hilferty).
double chi_square_critical_1e3(int df);

} // namespace treepack
