#pragma once

#include "treepack/census.hpp"
#include "treepack/graph.hpp"
#include "treepack/limping.hpp"
#include "treepack/load.hpp"
#include "treepack/quasirandom.hpp"
#include "treepack/tree.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace treepack {

/// One forest of the round: level j of tree (group, index).
struct RoundForest {
    int group = 0; ///< 0-based group i-1
    int index = 0; ///< s-1 within the group
    LevelForest forest;
};

/// U_{i,s}: host vertices already used by earlier levels of tree (i,s).
struct ForbiddenFamily {
    int n = 0;
    std::vector<SetFamily> groups; ///< groups[i][s], ascending vertex lists
};

enum class BadModeChoice { Auto, Exact, Sampled };

struct RoundParams {
    int round = 1;
    int n = 0;
    int r = 10;
    int c = 1;
    int delta = 3;
    double epsilon = 0.5;
    double alpha = 0.05; ///< skip tolerance of the sampler
    double gamma = 0.05; ///< extraction tolerance
    double beta = 0.05;
    BadModeChoice bad_mode = BadModeChoice::Auto;
    std::uint64_t bad_budget = kDefaultBadBudget;
    std::uint64_t bad_samples = 256;
    std::uint64_t defect_samples = 10000;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct ForestRecord {
    int group = 0;
    int index = 0;
    int order = 0;       ///< v(F_{i,s}) including roots
    int roots = 0;       ///< |X_{i,s}|
    int skipped = 0;     ///< |Y_{i,s}|
    int vc = 0;
    int ec = 0;
    int available = 0;   ///< |V_{i,s}|
    int extracted = 0;   ///< |V(G_{i,s})|
    int tuple_cap = 0;   ///< largest p tested for badness
    double density = 0.0;
    bool exact_bad = true;
};

struct ConformanceParams {
    double epsilon = 0.0;
    double beta = 0.0;
    int r = 1;
    double d = 1.0;
    int delta = 1;
    int n = 0;
};

struct Conformance {
    std::array<bool, 8> pass{};
    std::array<double, 8> value{};
    std::array<double, 8> bound{};
};

struct HypothesisFlags {
    bool forest_count_in_range = true; ///< n/2 <= sum k_i <= 2n
    bool roots_small = true;           ///< |X| <= alpha n / r
    bool forest_sizes = true;          ///< v(F) = (1 +- alpha) n_i
    bool density_above_epsilon = true; ///< d > epsilon
    bool forbidden_small = true;       ///< |U| < n
};

struct RoundLedger {
    int round = 0;
    std::vector<ForestRecord> forests;
    std::vector<int> fn, yn, xn; ///< per host vertex
    std::vector<LoadStats> group_loads;
    DefectReport residual_defect;
    double density_before = 0.0;
    std::int64_t edges_before = 0;
    std::int64_t edges_after = 0;
    std::int64_t distinct_pairs = 0;
    std::int64_t multiply_used_pairs = 0;
    int max_multiplicity = 0;
    HypothesisFlags hypotheses;
    ConformanceParams conformance_params;
    Conformance conformance;
    std::vector<std::string> notes;

    int max_skipped() const;
    int max_vc() const;
    int max_ec() const;
    int total_skipped() const;
    int total_vc() const;
    int total_ec() const;
    double max_sigma() const;

    std::string to_json() const;
    static std::string trajectory_header();
    std::string trajectory_row() const;
};

/// C1..C8 against the lemma's bounds; depends only on stored counts and params.
Conformance evaluate_conformance(const RoundLedger& ledger, const ConformanceParams& p);

struct RoundOutcome {
    bool ok = true;
    std::string failure;
    std::vector<PartialEmbedding> embeddings; ///< in host indices
    CollisionCensus census;
    RoundLedger ledger;
};

/// One nibble round. On success the host loses every used pair once and each
/// U_{i,s} gains V(h_{i,s}); on failure both are left untouched.
RoundOutcome run_round(HostGraph& host, std::span<const RoundForest> forests, ForbiddenFamily& forbidden,
                       const RoundParams& params);

} // namespace treepack
