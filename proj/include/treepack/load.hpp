#pragma once

#include <cstdint>
#include <vector>

namespace treepack {

using SetFamily = std::vector<std::vector<int>>;

/// mu and sigma of the pair loads load(v,w) = #{s : W_s meets {v,w}} over all
/// C(m,2) pairs, and the largest difference between two set sizes.
struct LoadStats {
    double mu = 0.0;
    double sigma = 0.0;
    int max_size_gap = 0;
    /// Exact integer sums behind mu and sigma: S1 = sum load, S2 = sum load^2.
    std::int64_t sum_load = 0;
    std::int64_t sum_load_sq = 0;
};

/// Uses per-vertex membership bitsets, so load(v,w) = c(v) + c(w) - both(v,w)
/// with both() a popcount of two k-bit rows. Work is O(sum |W_s| + m^2 k / 64).
/// Repeated vertices inside one set count once.
LoadStats load_stats(int m, const SetFamily& family);

struct TypicalityReport {
    double threshold = 0.0;          ///< sqrt(alpha) n^2
    std::vector<char> typical;       ///< per pair (v<w) in lexicographic order
    std::int64_t atypical = 0;
    double sqrt_alpha_bound = 0.0;   ///< sqrt(alpha) n^2 pairs, implied by sigma <= alpha n^4
    double fourth_root_bound = 0.0;  ///< alpha^(1/4) n^2 pairs
    bool homogeneous_sigma = false;  ///< sigma <= alpha n^4
};

/// Marks the pairs whose load lies within sqrt(sqrt(alpha) n^2) of mu.
TypicalityReport classify_typical(const SetFamily& family, double alpha, int m, int n);

/// Index of pair {v,w}, v < w, in lexicographic order over C(m,2).
std::int64_t pair_index(int m, int v, int w);

/// Zero-based indices of groups with more than sqrt(alpha) n r / 2 forests.
std::vector<int> important_groups(const std::vector<int>& group_sizes, double alpha, int n, int r);

} // namespace treepack
