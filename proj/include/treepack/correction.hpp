#pragma once

#include "treepack/tree.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace treepack {

/// Map entry of a vertex in R_i.
inline constexpr int kExcepted = -1;

/// h_i on V(T_i) \ R_i into the core K_m. maps[i][x] == kExcepted exactly for
/// x in exceptions[i].
struct AlmostPacking {
    int m = 0;
    std::vector<std::vector<int>> maps;
    std::vector<std::vector<int>> exceptions; ///< ascending
};

/// Builds the exception sets from the kExcepted entries of `maps`.
AlmostPacking make_almost_packing(int m, std::vector<std::vector<int>> maps);

struct CorrectionConfig {
    double epsilon = 0.5;
    /// |W|; defaults to floor(epsilon * m).
    std::optional<int> reserve_size;
    /// A reserve vertex enters Z once it lies in this many used reserve edges;
    /// defaults to epsilon * m / 2.
    std::optional<double> z_threshold;
};

struct CorrectionFailure {
    int tree = 0;
    int step = 0; ///< t, 1-based
    int x_size = 0;
    int y_size = 0;
    int z_size = 0;
    int u_size = 0;
    int reserve = 0;
    double epsilon = 0.0;
    int ell_achieved = 0;

    std::string to_json() const;
};

struct CorrectionStats {
    int steps = 0;
    int min_candidates = -1;    ///< smallest |W \ (X u Y u Z u U)| seen; -1 if no steps
    std::vector<int> z_history; ///< |Z_{i,t}| at every step
    int reserve = 0;
    double z_threshold = 0.0;
    std::int64_t reserve_edges_used = 0;
};

struct CorrectionResult {
    bool ok = true;
    std::optional<CorrectionFailure> failure;
    int host_order = 0; ///< m + |W|
    std::vector<std::vector<int>> maps; ///< h_i u h~_i
    /// Per tree: the vertices of R_i in the order they were placed.
    std::vector<std::vector<int>> placement_order;
    CorrectionStats stats;
};

/// Greedy relocation of every R_i into the reserve W = [m, m + |W|). Each
/// x_{i,t} goes to the lowest vertex of W outside X u Y u Z u U. Throws
/// InputError if a tree lies entirely inside R_i or the maps are malformed.
CorrectionResult correct(const AlmostPacking& ap, const std::vector<RootedTree>& trees, const CorrectionConfig& cfg);

/// Lower bound eps m - ell - Delta^2 ell - eps m / 8 - eps m / 2 on the
/// candidate set under the lemma's preconditions.
double correction_candidate_bound(double epsilon, int m, int delta, double ell);

/// Largest ell accepted by the lemma: eps^2 m / (64 Delta^2).
double correction_ell_limit(double epsilon, int m, int delta);

} // namespace treepack
