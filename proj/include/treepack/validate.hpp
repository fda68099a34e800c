#pragma once

#include "treepack/correction.hpp"
#include "treepack/tree.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace treepack {

struct CheckResult {
    std::string name;
    bool pass = true;
    std::string detail;
};

/// First violation in scan order. Unused fields stay at -1.
struct Witness {
    std::string clause;
    int tree = -1;
    int other_tree = -1;
    int vertex = -1;
    int other_vertex = -1;
    int host_a = -1;
    int host_b = -1;
};

struct Certificate {
    bool valid = true;
    std::vector<CheckResult> checks;
    std::optional<Witness> witness;

    std::string to_json() const;
};

/// Injectivity, edge preservation into K_{host_order} and global
/// edge-disjointness (sorted pair multiset). Throws InputError on a map of the
/// wrong length or with an out-of-range entry.
Certificate validate_packing(const std::vector<std::vector<int>>& maps, const std::vector<RootedTree>& trees,
                             int host_order);

struct AlmostCertificate {
    Certificate certificate;
    int ell = 0;                  ///< max(max_exceptions, max_neighbour_hits)
    int max_exceptions = 0;       ///< clause (b)
    int max_neighbour_hits = 0;   ///< clause (c)
    std::int64_t derived_y_bound = 0; ///< Delta^2 * max_neighbour_hits
};

/// Clauses (a) on the restrictions to V(T_i) \ R_i, (b) and (c). With a limit,
/// (b) and (c) fail when they exceed it.
AlmostCertificate validate_almost_packing(const AlmostPacking& ap, const std::vector<RootedTree>& trees,
                                          std::optional<int> ell_limit = std::nullopt);

/// Clause (c) by the direct triple loop over (v, tree, vertex).
std::vector<int> neighbour_hits_brute(const AlmostPacking& ap, const std::vector<RootedTree>& trees);

struct OracleResult {
    bool exists = false;
    std::vector<std::vector<int>> maps;
    std::uint64_t nodes = 0;
};

inline constexpr int kOracleMaxHost = 8;

/// Exact packing decision by backtracking. Throws CapabilityError past the
/// node budget or for host_order > kOracleMaxHost.
OracleResult exhaustive_pack_oracle(const std::vector<RootedTree>& trees, int host_order,
                                    std::uint64_t node_budget = 50'000'000);

} // namespace treepack
