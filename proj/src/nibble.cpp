#include "treepack/nibble.hpp"

#include "treepack/error.hpp"
#include "treepack/parallel.hpp"
#include "treepack/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace treepack {

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

struct ForestWork {
    PartialEmbedding h;
    ForestRecord rec;
    bool failed = false;
    std::string why;
};

ForestWork embed_one(const HostGraph& host, const RoundForest& rf, const std::vector<int>& forbidden,
                     const RoundParams& params)
{
    ForestWork w;
    const LevelForest& F = rf.forest;
    const int m = host.order();
    w.rec.group = rf.group;
    w.rec.index = rf.index;
    w.rec.order = F.order;
    w.rec.roots = int(F.roots().size());

    std::vector<char> banned(std::size_t(m), 0);
    for (int u : forbidden)
        banned[std::size_t(u)] = 1;
    std::vector<int> available;
    for (int v = 0; v < m; ++v)
        if (!banned[std::size_t(v)])
            available.push_back(v);
    w.rec.available = int(available.size());
    if (F.order > int(available.size()))
        throw InputError("forest (" + std::to_string(rf.group + 1) + "," + std::to_string(rf.index + 1) + ") has " +
                         std::to_string(F.order) + " vertices but only " + std::to_string(available.size()) +
                         " host vertices are available");

    w.h.assignment.assign(std::size_t(F.order), kUnmapped);
    if (w.rec.roots == F.order) {
        w.rec.extracted = int(available.size());
        return w;
    }

    const InducedSubgraph sub = induced_subgraph(host, available);
    const int cap = std::max(1, std::min(params.delta, secondary_tuple_cap(F)));
    w.rec.tuple_cap = cap;
    BadOptions opts;
    opts.budget = params.bad_budget;
    const bool exact = params.bad_mode == BadModeChoice::Exact ||
                       (params.bad_mode == BadModeChoice::Auto &&
                        binomial(sub.graph.order(), cap - 1) <= double(params.bad_budget));
    if (exact)
        opts.mode = ExactBad{};
    else
        opts.mode = SampledBad{params.bad_samples,
                               derive_seed(params.seed, {std::uint64_t(params.round), std::uint64_t(rf.group),
                                                         std::uint64_t(rf.index), 1})};
    w.rec.exact_bad = exact;
    const Extraction ex = extract_superquasirandom(sub.graph, params.gamma, cap, opts);
    w.rec.extracted = int(ex.kept.size());
    w.rec.density = ex.induced.graph.density();
    if (int(ex.kept.size()) < F.order) {
        w.failed = true;
        w.why = "extraction left " + std::to_string(ex.kept.size()) + " vertices for forest (" +
                std::to_string(rf.group + 1) + "," + std::to_string(rf.index + 1) + ") of order " +
                std::to_string(F.order);
        return w;
    }

    LimpingConfig cfg;
    cfg.alpha = params.alpha;
    cfg.density = w.rec.density;
    cfg.seed = derive_seed(params.seed, {std::uint64_t(params.round), std::uint64_t(rf.group), std::uint64_t(rf.index)});
    cfg.host = &ex.induced.graph;
    cfg.forest = &F;
    PartialEmbedding local = sample_limping(cfg);

    // Both index maps are ascending, so composing them keeps pair order.
    auto to_host = [&](int a) { return sub.to_parent[std::size_t(ex.induced.to_parent[std::size_t(a)])]; };
    w.h.assignment = local.assignment;
    for (int& a : w.h.assignment)
        if (a >= 0)
            a = to_host(a);
    w.h.skipped = std::move(local.skipped);
    for (int a : local.image_vertices)
        w.h.image_vertices.push_back(to_host(a));
    for (auto [a, b] : local.image_edges)
        w.h.image_edges.emplace_back(to_host(a), to_host(b));
    w.rec.skipped = int(w.h.skipped.size());
    return w;
}

void check_round_invariants(std::span<const RoundForest> forests, const std::vector<ForestWork>& work,
                            const ForbiddenFamily& forbidden)
{
    for (std::size_t f = 0; f < forests.size(); ++f) {
        const auto& rf = forests[f];
        const auto& h = work[f].h;
        const auto& U = forbidden.groups[std::size_t(rf.group)][std::size_t(rf.index)];
        for (int v : h.image_vertices)
            if (std::binary_search(U.begin(), U.end(), v))
                throw ContractViolation("embedding uses forbidden host vertex " + std::to_string(v));
        const LevelForest& F = rf.forest;
        for (int y : h.skipped)
            if (F.role[std::size_t(y)] != VertexRole::Secondary)
                throw ContractViolation("skipped vertex is not secondary");
        for (auto [a, b] : F.edges()) {
            const bool a_out = F.role[std::size_t(a)] == VertexRole::Root || h.assignment[std::size_t(a)] == kSkipped;
            const bool b_out = F.role[std::size_t(b)] == VertexRole::Root || h.assignment[std::size_t(b)] == kSkipped;
            if (a_out && b_out)
                throw ContractViolation("F[X u Y] has an edge");
        }
    }
}

} // namespace

// ---------------------------------------------------------------------------

int RoundLedger::max_skipped() const
{
    int m = 0;
    for (const auto& f : forests)
        m = std::max(m, f.skipped);
    return m;
}

int RoundLedger::max_vc() const
{
    int m = 0;
    for (const auto& f : forests)
        m = std::max(m, f.vc);
    return m;
}

int RoundLedger::max_ec() const
{
    int m = 0;
    for (const auto& f : forests)
        m = std::max(m, f.ec);
    return m;
}

int RoundLedger::total_skipped() const
{
    int t = 0;
    for (const auto& f : forests)
        t += f.skipped;
    return t;
}

int RoundLedger::total_vc() const
{
    int t = 0;
    for (const auto& f : forests)
        t += f.vc;
    return t;
}

int RoundLedger::total_ec() const
{
    int t = 0;
    for (const auto& f : forests)
        t += f.ec;
    return t;
}

double RoundLedger::max_sigma() const
{
    double m = 0.0;
    for (const auto& g : group_loads)
        m = std::max(m, g.sigma);
    return m;
}

Conformance evaluate_conformance(const RoundLedger& ledger, const ConformanceParams& p)
{
    Conformance c;
    const double n = p.n;
    const double r2 = double(p.r) * double(p.r);
    const double dD = std::pow(p.d, p.delta);
    const double eps = p.epsilon;
    const double per_level = p.beta * n / p.r;

    auto max_of = [](const std::vector<int>& xs) { return xs.empty() ? 0 : *std::max_element(xs.begin(), xs.end()); };

    c.value = {double(ledger.max_skipped()),
               double(ledger.max_vc()),
               double(ledger.max_ec()),
               double(max_of(ledger.fn)),
               double(max_of(ledger.yn)),
               double(max_of(ledger.xn)),
               ledger.residual_defect.max_abs_defect,
               ledger.max_sigma()};
    c.bound = {per_level,
               20.0 * n / (eps * r2 * dD),
               300.0 * p.delta * n / (eps * eps * r2 * dD),
               1e4 * std::pow(p.delta, 3) * n / (eps * eps * eps * r2 * dD * dD),
               per_level,
               per_level,
               p.beta,
               p.beta * n * n * n * n};
    for (int k = 0; k < 8; ++k)
        c.pass[std::size_t(k)] = c.value[std::size_t(k)] <= c.bound[std::size_t(k)];
    // C8 also bounds the size spread of the forbidden sets.
    for (const auto& g : ledger.group_loads)
        if (double(g.max_size_gap) > p.beta * n)
            c.pass[7] = false;
    return c;
}

std::string RoundLedger::to_json() const
{
    using json = nlohmann::ordered_json;
    json j;
    j["round"] = round;
    j["density_before"] = density_before;
    j["edges_before"] = edges_before;
    j["edges_after"] = edges_after;
    j["distinct_pairs"] = distinct_pairs;
    j["multiply_used_pairs"] = multiply_used_pairs;
    j["max_multiplicity"] = max_multiplicity;
    json fs = json::array();
    for (const auto& f : forests) {
        fs.push_back({{"group", f.group + 1},
                      {"index", f.index + 1},
                      {"order", f.order},
                      {"roots", f.roots},
                      {"skipped", f.skipped},
                      {"vc", f.vc},
                      {"ec", f.ec},
                      {"available", f.available},
                      {"extracted", f.extracted},
                      {"tuple_cap", f.tuple_cap},
                      {"density", f.density},
                      {"exact_bad", f.exact_bad}});
    }
    j["forests"] = fs;
    auto max_of = [](const std::vector<int>& xs) { return xs.empty() ? 0 : *std::max_element(xs.begin(), xs.end()); };
    j["max_fn"] = max_of(fn);
    j["max_yn"] = max_of(yn);
    j["max_xn"] = max_of(xn);
    json loads = json::array();
    for (std::size_t i = 0; i < group_loads.size(); ++i)
        loads.push_back({{"group", i + 1},
                         {"mu", group_loads[i].mu},
                         {"sigma", group_loads[i].sigma},
                         {"max_size_gap", group_loads[i].max_size_gap}});
    j["group_loads"] = loads;
    j["residual_defect"] = {{"mode", to_string(residual_defect.mode)},
                            {"density", residual_defect.density_used},
                            {"max_abs_defect", residual_defect.max_abs_defect},
                            {"subsets_tested", residual_defect.subsets_tested}};
    j["hypotheses"] = {{"forest_count_in_range", hypotheses.forest_count_in_range},
                       {"roots_small", hypotheses.roots_small},
                       {"forest_sizes", hypotheses.forest_sizes},
                       {"density_above_epsilon", hypotheses.density_above_epsilon},
                       {"forbidden_small", hypotheses.forbidden_small}};
    json conf = json::object();
    for (int k = 0; k < 8; ++k)
        conf["C" + std::to_string(k + 1)] = {{"value", conformance.value[std::size_t(k)]},
                                             {"bound", conformance.bound[std::size_t(k)]},
                                             {"pass", bool(conformance.pass[std::size_t(k)])}};
    j["conformance_params"] = {{"epsilon", conformance_params.epsilon}, {"beta", conformance_params.beta},
                               {"r", conformance_params.r},             {"d", conformance_params.d},
                               {"delta", conformance_params.delta},     {"n", conformance_params.n}};
    j["conformance"] = conf;
    j["notes"] = notes;
    return j.dump();
}

std::string RoundLedger::trajectory_header() { return "round,defect,sum_ec,sum_vc,sum_y,max_sigma"; }

std::string RoundLedger::trajectory_row() const
{
    std::ostringstream out;
    out.precision(17);
    out << round << ',' << residual_defect.max_abs_defect << ',' << total_ec() << ',' << total_vc() << ','
        << total_skipped() << ',' << max_sigma();
    return out.str();
}

// ---------------------------------------------------------------------------

RoundOutcome run_round(HostGraph& host, std::span<const RoundForest> forests, ForbiddenFamily& forbidden,
                       const RoundParams& params)
{
    const int m = host.order();
    for (const auto& rf : forests) {
        if (rf.group < 0 || rf.group >= int(forbidden.groups.size()) || rf.index < 0 ||
            rf.index >= int(forbidden.groups[std::size_t(rf.group)].size()))
            throw InputError("round forest refers to a missing forbidden set");
    }

    RoundOutcome out;
    RoundLedger& L = out.ledger;
    L.round = params.round;
    L.density_before = host.density();
    L.edges_before = host.edge_count();

    std::vector<ForestWork> work(forests.size());
    parallel_for(forests.size(), params.threads, [&](std::size_t f) {
        const auto& rf = forests[f];
        work[f] = embed_one(host, rf, forbidden.groups[std::size_t(rf.group)][std::size_t(rf.index)], params);
    });
    for (const auto& w : work) {
        if (w.failed) {
            out.ok = false;
            out.failure = w.why;
            for (const auto& x : work)
                L.forests.push_back(x.rec);
            return out;
        }
    }
    check_round_invariants(forests, work, forbidden);

    std::vector<PartialEmbedding> embs;
    std::vector<LevelForest> fs;
    embs.reserve(work.size());
    fs.reserve(work.size());
    for (std::size_t f = 0; f < work.size(); ++f) {
        embs.push_back(work[f].h);
        fs.push_back(forests[f].forest);
    }
    out.census = census_collisions(embs, fs, m);
    const auto& C = out.census;

    remove_edges(host, C.used_pairs);
    L.edges_after = host.edge_count();
    L.distinct_pairs = std::int64_t(C.used_pairs.size());
    if (L.edges_before - L.edges_after != L.distinct_pairs)
        throw ContractViolation("edge removal count differs from the number of distinct used pairs");
    L.multiply_used_pairs = C.multiply_used_pairs;
    for (int k : C.pair_multiplicity)
        L.max_multiplicity = std::max(L.max_multiplicity, k);

    for (std::size_t f = 0; f < forests.size(); ++f) {
        const auto& rf = forests[f];
        auto& U = forbidden.groups[std::size_t(rf.group)][std::size_t(rf.index)];
        std::vector<int> merged;
        std::set_union(U.begin(), U.end(), work[f].h.image_vertices.begin(), work[f].h.image_vertices.end(),
                       std::back_inserter(merged));
        U = std::move(merged);
        work[f].rec.vc = int(C.vc[f].size());
        work[f].rec.ec = int(C.ec[f].size());
        L.forests.push_back(work[f].rec);
    }
    L.fn.resize(std::size_t(m));
    L.yn.resize(std::size_t(m));
    L.xn.resize(std::size_t(m));
    for (int v = 0; v < m; ++v) {
        L.fn[std::size_t(v)] = int(C.fn[std::size_t(v)].size());
        L.yn[std::size_t(v)] = int(C.yn[std::size_t(v)].size());
        L.xn[std::size_t(v)] = int(C.xn[std::size_t(v)].size());
    }
    for (const auto& g : forbidden.groups)
        L.group_loads.push_back(m >= 2 ? load_stats(m, g) : LoadStats{});
    L.residual_defect = quasirandom_defect(
        host, SampledMode{params.defect_samples, derive_seed(params.seed, {std::uint64_t(params.round), 0xdefULL})});

    // Hypotheses of the round lemma, recorded rather than enforced.
    const double n = params.n;
    std::size_t k_total = 0;
    for (const auto& g : forbidden.groups)
        k_total += g.size();
    L.hypotheses.forest_count_in_range = 2.0 * double(k_total) >= n && double(k_total) <= 2.0 * n;
    L.hypotheses.density_above_epsilon = L.density_before > params.epsilon;
    for (const auto& rec : L.forests) {
        const double ni = n / (2.0 * params.r) + (rec.group + 1) * n / (2.0 * params.c * params.r);
        if (rec.roots > params.alpha * n / params.r)
            L.hypotheses.roots_small = false;
        if (std::abs(rec.order - ni) > params.alpha * ni)
            L.hypotheses.forest_sizes = false;
    }
    for (const auto& g : forbidden.groups)
        for (const auto& U : g)
            if (int(U.size()) >= params.n)
                L.hypotheses.forbidden_small = false;
    if (!L.hypotheses.forest_count_in_range)
        L.notes.push_back("forest count outside [n/2, 2n]");
    for (std::size_t i = 0; i < forbidden.groups.size(); ++i)
        if (forbidden.groups[i].empty())
            L.notes.push_back("group " + std::to_string(i + 1) + " is empty");

    L.conformance_params = {params.epsilon, params.beta, params.r, L.density_before, params.delta, params.n};
    L.conformance = evaluate_conformance(L, L.conformance_params);

    out.embeddings = std::move(embs);
    return out;
}

} // namespace treepack
