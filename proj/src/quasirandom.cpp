#include "treepack/quasirandom.hpp"

#include "treepack/error.hpp"
#include "treepack/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace treepack {

std::string to_string(DefectKind kind) { return kind == DefectKind::Exact ? "exact" : "sampled"; }

double subset_defect(std::int64_t edges_in_b, int subset_size, double density, int order)
{
    if (order == 0)
        return 0.0;
    const double pairs = double(subset_size) * double(subset_size - 1) / 2.0;
    return std::abs(double(edges_in_b) - density * pairs) / (double(order) * double(order));
}

namespace {

std::vector<int> mask_vertices(std::span<const Word> mask)
{
    std::vector<int> out;
    for (std::size_t w = 0; w < mask.size(); ++w) {
        Word bits = mask[w];
        while (bits) {
            out.push_back(int(w) * kWordBits + std::countr_zero(bits));
            bits &= bits - 1;
        }
    }
    return out;
}

DefectReport exact_defect(const HostGraph& g)
{
    const int m = g.order();
    if (m > kExactDefectMaxOrder)
        throw CapabilityError("exact quasirandom defect needs m <= " +
                              std::to_string(kExactDefectMaxOrder) + ", got m = " + std::to_string(m));
    std::vector<std::uint32_t> adj(std::size_t(m), 0);
    for (int v = 0; v < m; ++v)
        adj[std::size_t(v)] = m == 0 ? 0 : std::uint32_t(g.row(v)[0]);

    DefectReport report;
    report.mode = DefectKind::Exact;
    report.density_used = g.density();
    report.subsets_tested = std::uint64_t(1) << m;

    // Gray-code walk: each step toggles one vertex and adjusts e(B) by its
    // degree into the rest of B.
    std::uint32_t subset = 0;
    std::uint32_t best_mask = 0;
    std::int64_t e = 0;
    int size = 0;
    double best = subset_defect(0, 0, report.density_used, m);
    for (std::uint64_t i = 1; i < report.subsets_tested; ++i) {
        const int v = std::countr_zero(i);
        const std::uint32_t bit = std::uint32_t(1) << v;
        if (subset & bit) {
            subset &= ~bit;
            e -= std::popcount(adj[std::size_t(v)] & subset);
            --size;
        } else {
            e += std::popcount(adj[std::size_t(v)] & subset);
            subset |= bit;
            ++size;
        }
        const double score = subset_defect(e, size, report.density_used, m);
        if (score > best) {
            best = score;
            best_mask = subset;
        }
    }
    report.max_abs_defect = best;
    for (int v = 0; v < m; ++v)
        if (best_mask & (std::uint32_t(1) << v))
            report.worst_subset.push_back(v);
    return report;
}

} // namespace

DefectReport defect_over_subsets(const HostGraph& g, std::span<const std::vector<Word>> subsets)
{
    DefectReport report;
    report.mode = DefectKind::Sampled;
    report.density_used = g.density();
    report.subsets_tested = subsets.size();
    std::size_t best_index = subsets.size();
    double best = -1.0;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        const auto& mask = subsets[i];
        if (int(mask.size()) != g.row_words())
            throw InputError("subset mask has wrong width");
        int size = 0;
        for (Word w : mask)
            size += std::popcount(w);
        const double score = subset_defect(edges_within(g, mask), size, report.density_used, g.order());
        if (score > best) {
            best = score;
            best_index = i;
        }
    }
    if (best_index < subsets.size()) {
        report.max_abs_defect = best;
        report.worst_subset = mask_vertices(subsets[best_index]);
    }
    return report;
}

DefectReport quasirandom_defect(const HostGraph& g, const DefectMode& mode)
{
    if (std::holds_alternative<ExactMode>(mode))
        return exact_defect(g);

    const auto& sampled = std::get<SampledMode>(mode);
    if (sampled.count < 1)
        throw InputError("sampled defect needs at least one subset");
    Engine rng = make_engine(sampled.seed);
    const int words = g.row_words();
    const int tail = g.order() % kWordBits;
    const Word tail_mask = tail == 0 ? ~Word(0) : (Word(1) << tail) - 1;

    // Streams subsets in batches to bound memory.
    constexpr std::uint64_t kBatch = 1024;
    DefectReport report;
    report.mode = DefectKind::Sampled;
    report.density_used = g.density();
    std::vector<std::vector<Word>> batch;
    for (std::uint64_t done = 0; done < sampled.count;) {
        const std::uint64_t take = std::min(kBatch, sampled.count - done);
        batch.assign(take, std::vector<Word>(std::size_t(words), 0));
        for (auto& mask : batch) {
            for (int w = 0; w < words; ++w)
                mask[std::size_t(w)] = rng();
            if (words > 0)
                mask.back() &= tail_mask;
        }
        DefectReport part = defect_over_subsets(g, batch);
        if (done == 0 || part.max_abs_defect > report.max_abs_defect) {
            report.max_abs_defect = part.max_abs_defect;
            report.worst_subset = std::move(part.worst_subset);
        }
        done += take;
    }
    report.subsets_tested = sampled.count;
    return report;
}

// ---------------------------------------------------------------------------

namespace {

double binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * double(n - k + i) / double(i);
    return r;
}

/// Enumerates all p-subsets in lexicographic order, carrying the AND of
/// their rows, and credits every member of each bad set.
struct BadSetCounter {
    const HostGraph& g;
    double density;
    double gamma;
    int p;
    std::vector<double>& counts;
    std::vector<std::vector<Word>> stack;
    std::vector<int> chosen;

    void run()
    {
        stack.assign(std::size_t(p), std::vector<Word>(std::size_t(g.row_words())));
        chosen.assign(std::size_t(p), 0);
        descend(0, 0);
    }

    void descend(int depth, int start)
    {
        const int m = g.order();
        for (int v = start; v <= m - (p - depth); ++v) {
            auto r = g.row(v);
            auto& acc = stack[std::size_t(depth)];
            if (depth == 0)
                std::copy(r.begin(), r.end(), acc.begin());
            else {
                const auto& prev = stack[std::size_t(depth - 1)];
                for (std::size_t w = 0; w < acc.size(); ++w)
                    acc[w] = prev[w] & r[w];
            }
            chosen[std::size_t(depth)] = v;
            if (depth + 1 == p) {
                std::int64_t c = 0;
                for (Word w : acc)
                    c += std::popcount(w);
                if (outside_band(c, density, gamma, p, m))
                    for (int x : chosen)
                        counts[std::size_t(x)] += 1.0;
            } else {
                descend(depth + 1, v + 1);
            }
        }
    }
};

} // namespace

double bad_threshold(double gamma, int order, int p) { return gamma * binomial(order, p - 1); }

BadProfile bad_profile(const HostGraph& g, double gamma, int delta_cap, const BadOptions& options)
{
    if (delta_cap < 1)
        throw InputError("bad_profile: delta_cap must be >= 1");
    if (!(gamma > 0.0))
        throw InputError("bad_profile: gamma must be positive");
    const int m = g.order();
    const double d = g.density();

    BadProfile profile;
    profile.gamma = gamma;
    profile.delta_cap = delta_cap;
    profile.density_used = d;
    profile.per_vertex.assign(std::size_t(delta_cap), std::vector<double>(std::size_t(m), 0.0));

    const bool exact = std::holds_alternative<ExactBad>(options.mode);
    profile.exact = exact;
    if (exact) {
        for (int p = 1; p <= delta_cap; ++p)
            if (binomial(m, p - 1) > double(options.budget))
                throw CapabilityError("bad_profile: exact enumeration for p = " + std::to_string(p) +
                                      " needs C(" + std::to_string(m) + "," + std::to_string(p - 1) +
                                      ") tuples, above the budget of " + std::to_string(options.budget));
    }

    for (int v = 0; v < m; ++v)
        profile.per_vertex[0][std::size_t(v)] = outside_band(g.degree(v), d, gamma, 1, m) ? 1.0 : 0.0;

    if (exact) {
        for (int p = 2; p <= delta_cap && p <= m; ++p) {
            BadSetCounter counter{g, d, gamma, p, profile.per_vertex[std::size_t(p - 1)], {}, {}};
            counter.run();
        }
    } else {
        const auto& sampled = std::get<SampledBad>(options.mode);
        if (sampled.samples_per_vertex < 1)
            throw InputError("bad_profile: samples_per_vertex must be >= 1");
        profile.samples_per_vertex = sampled.samples_per_vertex;
        std::vector<Word> acc(std::size_t(g.row_words()));
        std::vector<int> pick;
        for (int p = 2; p <= delta_cap && p <= m; ++p) {
            const double population = binomial(m - 1, p - 1);
            for (int v = 0; v < m; ++v) {
                Engine rng = make_engine(derive_seed(sampled.seed, {std::uint64_t(p), std::uint64_t(v)}));
                std::uint64_t hits = 0;
                for (std::uint64_t s = 0; s < sampled.samples_per_vertex; ++s) {
                    // Uniform (p-1)-subset of V \ {v} by rejection of repeats.
                    pick.clear();
                    while (int(pick.size()) < p - 1) {
                        int u = int(uniform_below(rng, std::uint64_t(m - 1)));
                        if (u >= v)
                            ++u;
                        if (std::find(pick.begin(), pick.end(), u) == pick.end())
                            pick.push_back(u);
                    }
                    auto rv = g.row(v);
                    std::copy(rv.begin(), rv.end(), acc.begin());
                    for (int u : pick) {
                        auto ru = g.row(u);
                        for (std::size_t w = 0; w < acc.size(); ++w)
                            acc[w] &= ru[w];
                    }
                    std::int64_t c = 0;
                    for (Word w : acc)
                        c += std::popcount(w);
                    if (outside_band(c, d, gamma, p, m))
                        ++hits;
                }
                profile.per_vertex[std::size_t(p - 1)][std::size_t(v)] =
                    population * double(hits) / double(sampled.samples_per_vertex);
            }
        }
    }

    for (int v = 0; v < m; ++v) {
        for (int p = 1; p <= delta_cap; ++p) {
            if (profile.bad(v, p) > bad_threshold(gamma, m, p)) {
                profile.bad_vertex_set.push_back(v);
                break;
            }
        }
    }
    return profile;
}

Extraction extract_superquasirandom(const HostGraph& g, double gamma, int delta_cap, const BadOptions& options)
{
    Extraction out;
    out.profile = bad_profile(g, gamma, delta_cap, options);
    std::vector<char> drop(std::size_t(g.order()), 0);
    for (int v : out.profile.bad_vertex_set)
        drop[std::size_t(v)] = 1;
    for (int v = 0; v < g.order(); ++v)
        if (!drop[std::size_t(v)])
            out.kept.push_back(v);
    out.induced = induced_subgraph(g, out.kept);
    return out;
}

} // namespace treepack
