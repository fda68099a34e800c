#pragma once

#include "treepack/correction.hpp"
#include "treepack/graph.hpp"
#include "treepack/nibble.hpp"
#include "treepack/tree.hpp"
#include "treepack/validate.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace treepack {

struct PipelineConfig {
    double epsilon = 0.5;
    /// Degree bound the family is checked against; 0 takes the family's own.
    int delta = 0;
    bool paper_faithful = false;

    // Round parameters (practical mode).
    int r = 8;
    std::optional<int> c;     ///< groups; default ceil(50/eps) capped at kPracticalGroupCap
    double rho = 1.0;         ///< cutting threshold passed to cut_into_levels
    double gamma = 0.2;
    double alpha = 0.2;
    double beta = 0.05;

    /// Core order m = floor((1 + core_share * eps) n); the existence proof uses 1/4.
    double core_share = 0.25;
    /// epsilon handed to the correction step; the existence proof uses eps / 2.
    std::optional<double> correction_epsilon;
    /// Z threshold of the correction step; default correction_epsilon * m / 2.
    std::optional<double> z_threshold;

    BadModeChoice bad_mode = BadModeChoice::Auto;
    std::uint64_t bad_budget = kDefaultBadBudget;
    std::uint64_t bad_samples = 256;
    std::uint64_t defect_samples = 2000;

    std::uint64_t seed = 0;
    int retries = 0;
    int threads = 1;
};

inline constexpr int kPracticalGroupCap = 8;

/// Constants of the existence proof for given eps and Delta. The nibble
/// lemma's alpha is not explicit; alpha_1 <= beta_r, so n0 here is a lower
/// bound on the true n_0.
struct PaperConstants {
    int c = 0;
    double r = 0.0;
    double beta_r = 0.0;
    double alpha_1_upper = 0.0;
    double rho = 0.0;
    double n0_lower = 0.0;
};

PaperConstants paper_constants(double epsilon, int delta);

/// Host layout: the full clique K_N with N = floor((1 + eps) n), core [0, m)
/// and reserve [m, N).
struct HostSplit {
    int total = 0;
    int core = 0;
    int reserve = 0;
    double correction_epsilon = 0.0;
    double z_threshold = 0.0;
};

HostSplit host_split(int n, const PipelineConfig& cfg);

struct ExceptionalEmbedding {
    std::vector<int> map;
    std::vector<VertexPair> used;
};

/// BFS from the root; each vertex goes to the lowest-indexed vertex adjacent to
/// its parent's image that this tree has not used. Removes the used edges from
/// `host`. Throws InputError if v(T_0) exceeds the host order and
/// ContractViolation if some vertex has no available neighbour.
ExceptionalEmbedding embed_exceptional(HostGraph& host, const RootedTree& t0);

struct RoundSummary {
    std::string ledger_json;
    std::string trajectory_row;
};

struct PackingResult {
    bool ok = false;
    int attempt = 0;
    std::uint64_t attempt_seed = 0;
    int host_order = 0;
    std::vector<std::vector<int>> maps; ///< per input tree, into [0, host_order)
    Certificate certificate;

    // Failure report (ok == false).
    std::string failure_stage;
    std::string failure_message;

    // Metrics.
    HostSplit split;
    int r = 0;
    int c = 0;
    double rho = 0.0;
    std::vector<RoundSummary> rounds;
    std::optional<int> exceptional_input; ///< input tree that became T_0, if any
    int almost_ell = 0;
    int almost_max_exceptions = 0;
    int almost_max_hits = 0;
    std::int64_t total_exceptions = 0;
    CorrectionStats correction;
    std::optional<CorrectionFailure> correction_failure;
    int reserve_vertices_used = 0;
    std::int64_t padding_edges = 0;
    double t0_residual_defect = 0.0;
    std::vector<std::string> notes;
    double seconds = 0.0; ///< wall clock; kept out of to_json

    /// {"trees":[{"id","map"}], "certificate", "metrics"} on success; the
    /// failure report otherwise. Deterministic for a fixed seed.
    std::string to_json() const;
    /// Metrics only (ledgers, trajectory, correction statistics).
    std::string metrics_json() const;
};

/// Full construction with retries on round or correction failure. Throws
/// InputError on precondition violations (including n < n_0 in paper-faithful mode).
PackingResult pack_family(const TreeFamily& fam, const PipelineConfig& cfg);

} // namespace treepack
