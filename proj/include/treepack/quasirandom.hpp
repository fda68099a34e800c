#pragma once

#include "treepack/graph.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace treepack {

struct ExactMode {};

struct SampledMode {
    std::uint64_t count = 10000;
    std::uint64_t seed = 0;
};

using DefectMode = std::variant<ExactMode, SampledMode>;

enum class DefectKind { Exact, Sampled };

std::string to_string(DefectKind kind);

/// Largest deviation |e(B) - d C(|B|,2)| / m^2 found over the tested subsets B.
/// In sampled mode the value is a lower bound on the true defect.
struct DefectReport {
    double density_used = 0.0;
    double max_abs_defect = 0.0;
    DefectKind mode = DefectKind::Exact;
    std::uint64_t subsets_tested = 0;
    std::vector<int> worst_subset;
};

inline constexpr int kExactDefectMaxOrder = 20;

/// Exact mode enumerates all 2^m subsets (m <= 20, CapabilityError otherwise)
/// in Gray-code order with incremental edge counts. Sampled mode draws each
/// vertex into B independently with probability 1/2.
DefectReport quasirandom_defect(const HostGraph& g, const DefectMode& mode);

/// Evaluates the defect on an explicit subset list (each a row_words() mask),
/// counting e(B) from scratch per subset. Reported as sampled.
DefectReport defect_over_subsets(const HostGraph& g, std::span<const std::vector<Word>> subsets);

/// The per-subset score both routes share, so that equal subsets give
/// bit-identical values.
double subset_defect(std::int64_t edges_in_b, int subset_size, double density, int order);

struct ExactBad {};

struct SampledBad {
    std::uint64_t samples_per_vertex = 256;
    std::uint64_t seed = 0;
};

using BadMode = std::variant<ExactBad, SampledBad>;

inline constexpr std::uint64_t kDefaultBadBudget = 10'000'000;

/// bad_{gamma,p}(v) for p = 1..delta_cap. Exact counts enumerate the
/// (p-1)-subsets of V \ {v}; sampled values are unbiased estimates of the
/// same count scaled from uniform subsets.
struct BadProfile {
    double gamma = 0.0;
    int delta_cap = 0;
    double density_used = 0.0;
    bool exact = true;
    std::uint64_t samples_per_vertex = 0;
    /// per_vertex[p-1][v]
    std::vector<std::vector<double>> per_vertex;
    std::vector<int> bad_vertex_set;

    double bad(int v, int p) const { return per_vertex[std::size_t(p - 1)][std::size_t(v)]; }
};

struct BadOptions {
    BadMode mode = ExactBad{};
    std::uint64_t budget = kDefaultBadBudget;
};

/// Badness is evaluated against g's own density.
BadProfile bad_profile(const HostGraph& g, double gamma, int delta_cap, const BadOptions& options = {});

/// Threshold gamma * C(m, p-1) used for membership in BAD.
double bad_threshold(double gamma, int order, int p);

struct Extraction {
    std::vector<int> kept;   ///< V' in ascending parent indices
    InducedSubgraph induced; ///< g[V'] with map back to g
    BadProfile profile;
};

/// One trimming pass: V' = V \ BAD_{gamma,delta}(g).
Extraction extract_superquasirandom(const HostGraph& g, double gamma, int delta_cap,
                                    const BadOptions& options = {});

} // namespace treepack
