#include "treepack/pipeline.hpp"

#include "treepack/error.hpp"
#include "treepack/quasirandom.hpp"
#include "treepack/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>

namespace treepack {

namespace {

using json = nlohmann::ordered_json;

int floor_eps(double x) { return int(std::floor(x + 1e-9)); }

} // namespace

PaperConstants paper_constants(double epsilon, int delta)
{
    if (!(epsilon > 0.0) || delta < 1)
        throw InputError("proof constants need eps > 0 and delta >= 1");
    PaperConstants pc;
    pc.c = group_count(epsilon);
    pc.r = 1000.0 * delta * delta / std::pow(epsilon, 10.0 * delta);
    pc.beta_r = epsilon * epsilon / 100.0;
    pc.alpha_1_upper = pc.beta_r;
    pc.rho = std::min(1.0 / (4.0 * pc.r), pc.alpha_1_upper);
    pc.n0_lower = 8.0 * delta * pc.r / (pc.rho * pc.alpha_1_upper);
    return pc;
}

HostSplit host_split(int n, const PipelineConfig& cfg)
{
    HostSplit s;
    s.total = floor_eps((1.0 + cfg.epsilon) * n);
    s.core = std::min(s.total, floor_eps((1.0 + cfg.core_share * cfg.epsilon) * n));
    s.reserve = s.total - s.core;
    s.correction_epsilon = cfg.correction_epsilon.value_or(cfg.epsilon / 2.0);
    s.z_threshold = cfg.z_threshold.value_or(s.correction_epsilon * s.core / 2.0);
    return s;
}

ExceptionalEmbedding embed_exceptional(HostGraph& host, const RootedTree& t0)
{
    const int m = host.order();
    if (t0.order() > m)
        throw InputError("exceptional tree of order " + std::to_string(t0.order()) + " does not fit a host of order " +
                         std::to_string(m));
    ExceptionalEmbedding out;
    out.map.assign(std::size_t(t0.order()), -1);
    std::vector<char> taken(std::size_t(m), 0);
    const auto adj = t0.adjacency();

    out.map[std::size_t(t0.root())] = 0;
    taken[0] = 1;
    std::deque<int> queue{t0.root()};
    while (!queue.empty()) {
        const int x = queue.front();
        queue.pop_front();
        const int hx = out.map[std::size_t(x)];
        for (int y : adj[std::size_t(x)]) {
            if (out.map[std::size_t(y)] >= 0)
                continue;
            int pick = -1;
            for (int w = 0; w < m && pick < 0; ++w)
                if (!taken[std::size_t(w)] && host.has_edge(hx, w))
                    pick = w;
            if (pick < 0)
                throw ContractViolation("no available neighbour for exceptional tree vertex " + std::to_string(y));
            out.map[std::size_t(y)] = pick;
            taken[std::size_t(pick)] = 1;
            out.used.push_back(ordered_pair(hx, pick));
            queue.push_back(y);
        }
    }
    std::sort(out.used.begin(), out.used.end());
    remove_edges(host, out.used);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Prepared {
    MergeResult merged;
    GroupedFamily grouped;
    int r = 0;
    int c = 0;
    double rho = 0.0;
    std::vector<const PaddedTree*> padded;           ///< flattened, group-major
    std::vector<std::pair<int, int>> padded_slot;    ///< (group, index)
    std::vector<std::vector<LevelForest>> forests;   ///< per padded tree, per level
};

Prepared prepare(const TreeFamily& fam, const PipelineConfig& cfg)
{
    Prepared p;
    p.merged = merge_small_trees_tracked(fam);
    if (cfg.paper_faithful) {
        const PaperConstants pc = paper_constants(cfg.epsilon, fam.delta);
        p.c = pc.c;
        p.r = int(std::ceil(pc.r));
        p.rho = pc.rho;
    } else {
        p.c = cfg.c.value_or(group_count(cfg.epsilon, kPracticalGroupCap));
        p.r = cfg.r;
        p.rho = cfg.rho;
    }
    p.grouped = group_and_pad(p.merged.family, p.c);
    for (int g = 0; g < int(p.grouped.groups.size()); ++g)
        for (int s = 0; s < int(p.grouped.groups[std::size_t(g)].size()); ++s) {
            const PaddedTree& pt = p.grouped.groups[std::size_t(g)][std::size_t(s)];
            p.padded.push_back(&pt);
            p.padded_slot.emplace_back(g, s);
            const LevelPartition lp = cfg.paper_faithful
                                          ? balanced_level_partition(pt.tree, p.r, p.rho, fam.delta)
                                          : cut_into_levels(pt.tree, p.r, p.rho);
            std::vector<LevelForest> fs;
            for (const auto& level : lp.levels)
                fs.push_back(level_forest(pt.tree, level));
            p.forests.push_back(std::move(fs));
        }
    return p;
}

void run_attempt(const TreeFamily& fam, const PipelineConfig& cfg, const Prepared& prep, std::uint64_t seed,
                 PackingResult& res)
{
    const int n = fam.n;
    const HostSplit& split = res.split;
    const int m = split.core;
    HostGraph host = HostGraph::complete(m);

    // T_0 first, on the pristine core.
    std::vector<int> t0_map;
    if (prep.grouped.exceptional_tree) {
        t0_map = embed_exceptional(host, *prep.grouped.exceptional_tree).map;
        res.t0_residual_defect =
            quasirandom_defect(host, SampledMode{cfg.defect_samples, derive_seed(seed, {0x70ULL})}).max_abs_defect;
    }

    const std::size_t k = prep.padded.size();
    std::vector<std::vector<int>> tree_maps(k);
    for (std::size_t t = 0; t < k; ++t)
        tree_maps[t].assign(std::size_t(prep.padded[t]->tree.order()), kExcepted);

    ForbiddenFamily forbidden;
    forbidden.n = n;
    forbidden.groups.resize(prep.grouped.groups.size());
    for (std::size_t g = 0; g < prep.grouped.groups.size(); ++g)
        forbidden.groups[g].resize(prep.grouped.groups[g].size());

    RoundParams rp;
    rp.n = n;
    rp.r = prep.r;
    rp.c = prep.c;
    rp.delta = fam.delta;
    rp.epsilon = cfg.epsilon;
    rp.alpha = cfg.alpha;
    rp.gamma = cfg.gamma;
    rp.beta = cfg.beta;
    rp.bad_mode = cfg.bad_mode;
    rp.bad_budget = cfg.bad_budget;
    rp.bad_samples = cfg.bad_samples;
    rp.defect_samples = cfg.defect_samples;
    rp.seed = seed;
    rp.threads = cfg.threads;

    for (int j = 0; j < prep.r; ++j) {
        std::vector<RoundForest> rf;
        rf.reserve(k);
        for (std::size_t t = 0; t < k; ++t)
            rf.push_back({prep.padded_slot[t].first, prep.padded_slot[t].second, prep.forests[t][std::size_t(j)]});
        rp.round = j + 1;
        RoundOutcome out;
        try {
            out = run_round(host, rf, forbidden, rp);
        } catch (const InputError& e) {
            res.failure_stage = "round " + std::to_string(j + 1);
            res.failure_message = e.what();
            return;
        }
        res.rounds.push_back({out.ledger.to_json(), out.ledger.trajectory_row()});
        if (!out.ok) {
            res.failure_stage = "round " + std::to_string(j + 1);
            res.failure_message = out.failure;
            return;
        }
        for (std::size_t t = 0; t < k; ++t) {
            const LevelForest& F = rf[t].forest;
            const PartialEmbedding& h = out.embeddings[t];
            std::vector<char> faulty(std::size_t(F.order), 0);
            for (int x : out.census.vc[t])
                faulty[std::size_t(x)] = 1;
            for (int x : out.census.ec[t])
                faulty[std::size_t(x)] = 1;
            for (int x = 0; x < F.order; ++x) {
                const int a = h.assignment[std::size_t(x)];
                if (F.role[std::size_t(x)] == VertexRole::Root || a < 0 || faulty[std::size_t(x)])
                    continue;
                tree_maps[t][std::size_t(F.source_vertex[std::size_t(x)])] = a;
            }
        }
    }

    // Almost packing: T_0 (no exceptions) first, then the padded trees.
    std::vector<RootedTree> ap_trees;
    std::vector<std::vector<int>> ap_maps;
    if (prep.grouped.exceptional_tree) {
        ap_trees.push_back(*prep.grouped.exceptional_tree);
        ap_maps.push_back(t0_map);
    }
    const std::size_t offset = ap_trees.size();
    for (std::size_t t = 0; t < k; ++t) {
        ap_trees.push_back(prep.padded[t]->tree);
        ap_maps.push_back(std::move(tree_maps[t]));
    }
    const AlmostPacking ap = make_almost_packing(m, std::move(ap_maps));
    const AlmostCertificate ac = validate_almost_packing(ap, ap_trees);
    if (!ac.certificate.valid)
        throw ContractViolation("assembled almost packing is invalid: " + ac.certificate.to_json());
    res.almost_ell = ac.ell;
    res.almost_max_exceptions = ac.max_exceptions;
    res.almost_max_hits = ac.max_neighbour_hits;
    for (const auto& r : ap.exceptions)
        res.total_exceptions += std::int64_t(r.size());

    CorrectionConfig cc;
    cc.epsilon = split.correction_epsilon;
    cc.reserve_size = split.reserve;
    cc.z_threshold = split.z_threshold;
    CorrectionResult cr;
    try {
        cr = correct(ap, ap_trees, cc);
    } catch (const InputError& e) {
        res.failure_stage = "correction";
        res.failure_message = e.what();
        return;
    }
    res.correction = cr.stats;
    if (!cr.ok) {
        res.correction_failure = cr.failure;
        res.failure_stage = "correction";
        res.failure_message = cr.failure->to_json();
        return;
    }
    {
        std::vector<char> seen(std::size_t(split.reserve), 0);
        for (const auto& map : cr.maps)
            for (int v : map)
                if (v >= m && !seen[std::size_t(v - m)]) {
                    seen[std::size_t(v - m)] = 1;
                    ++res.reserve_vertices_used;
                }
    }

    // Projection onto the input trees.
    std::vector<int> ap_index_of_merged(prep.merged.family.trees.size(), -1);
    if (prep.grouped.exceptional_source)
        ap_index_of_merged[std::size_t(*prep.grouped.exceptional_source)] = 0;
    for (std::size_t t = 0; t < k; ++t)
        ap_index_of_merged[std::size_t(prep.padded[t]->source)] = int(offset + t);
    res.maps.resize(fam.trees.size());
    for (std::size_t i = 0; i < fam.trees.size(); ++i) {
        const TreePlacement& pl = prep.merged.placements[i];
        const int idx = ap_index_of_merged[std::size_t(pl.tree)];
        if (idx < 0)
            throw ContractViolation("input tree " + std::to_string(i) + " was lost during grouping");
        const auto& full = cr.maps[std::size_t(idx)];
        auto& out = res.maps[i];
        out.resize(pl.vertex_map.size());
        for (std::size_t x = 0; x < pl.vertex_map.size(); ++x)
            out[x] = full[std::size_t(pl.vertex_map[x])];
    }

    res.certificate = validate_packing(res.maps, fam.trees, split.total);
    if (!res.certificate.valid)
        throw ContractViolation("pipeline produced an invalid packing: " + res.certificate.to_json());
    res.ok = true;
}

void check_config(const TreeFamily& fam, const PipelineConfig& cfg)
{
    if (!(cfg.epsilon > 0.0))
        throw InputError("epsilon must be positive");
    if (fam.delta < 1)
        throw InputError("delta must be at least 1");
    if (cfg.r < 1)
        throw InputError("r must be at least 1");
    if (cfg.c && *cfg.c < 1)
        throw InputError("the number of groups must be at least 1");
    if (!(cfg.rho > 0.0 && cfg.rho < 2.0))
        throw InputError("rho must lie in (0, 2)");
    if (!(cfg.alpha > 0.0) || !(cfg.gamma > 0.0) || !(cfg.beta > 0.0))
        throw InputError("alpha, gamma and beta must be positive");
    if (!(cfg.core_share > 0.0 && cfg.core_share <= 1.0))
        throw InputError("core share must lie in (0, 1]");
    if (cfg.correction_epsilon && !(*cfg.correction_epsilon > 0.0))
        throw InputError("correction epsilon must be positive");
    if (cfg.retries < 0)
        throw InputError("retries must be non-negative");
    check_family_bounds(fam);
}

} // namespace

PackingResult pack_family(const TreeFamily& input, const PipelineConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    TreeFamily fam = input;
    if (cfg.delta > 0) {
        if (fam.delta > cfg.delta)
            for (const auto& t : fam.trees)
                if (t.max_degree() > cfg.delta)
                    throw InputError("a tree has degree " + std::to_string(t.max_degree()) + " > delta " +
                                     std::to_string(cfg.delta));
        fam.delta = cfg.delta;
    }
    check_config(fam, cfg);
    if (cfg.paper_faithful) {
        const PaperConstants pc = paper_constants(cfg.epsilon, fam.delta);
        if (double(fam.n) < pc.n0_lower) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6g", pc.n0_lower);
            throw InputError("paper-faithful constants need n >= n_0 >= " + std::string(buf) + " (r = " +
                             std::to_string(pc.r) + "); got n = " + std::to_string(fam.n));
        }
    }

    PackingResult res;
    res.split = host_split(fam.n, cfg);
    res.host_order = res.split.total;
    if (fam.trees.empty()) {
        res.ok = true;
        res.certificate = validate_packing({}, {}, res.host_order);
        return res;
    }
    const Prepared prep = prepare(fam, cfg);
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        const std::uint64_t seed = attempt == 0 ? cfg.seed : derive_seed(cfg.seed, {std::uint64_t(attempt)});
        PackingResult r;
        r.split = res.split;
        r.host_order = res.host_order;
        r.attempt = attempt;
        r.attempt_seed = seed;
        r.r = prep.r;
        r.c = prep.c;
        r.rho = prep.rho;
        r.padding_edges = prep.grouped.added_path_edges;
        r.exceptional_input = std::nullopt;
        if (prep.grouped.exceptional_source)
            for (std::size_t i = 0; i < prep.merged.placements.size(); ++i)
                if (prep.merged.placements[i].tree == *prep.grouped.exceptional_source) {
                    r.exceptional_input = int(i);
                    break;
                }
        std::size_t k_total = prep.padded.size();
        if (2 * k_total < std::size_t(fam.n))
            r.notes.push_back("fewer than n/2 forests per round; the dummy-tree padding is not applied");
        run_attempt(fam, cfg, prep, seed, r);
        res = std::move(r);
        if (res.ok)
            break;
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

// ---------------------------------------------------------------------------

std::string PackingResult::metrics_json() const
{
    json j;
    j["status"] = ok ? "success" : "failure";
    j["attempt"] = attempt;
    j["seed"] = attempt_seed;
    j["host"] = {{"total", split.total},
                 {"core", split.core},
                 {"reserve", split.reserve},
                 {"correction_epsilon", split.correction_epsilon},
                 {"z_threshold", split.z_threshold}};
    j["r"] = r;
    j["c"] = c;
    j["rho"] = rho;
    j["padding_edges"] = padding_edges;
    j["exceptional_input"] = exceptional_input ? json(*exceptional_input) : json(nullptr);
    j["t0_residual_defect"] = t0_residual_defect;
    json rs = json::array();
    std::string trajectory = RoundLedger::trajectory_header() + "\n";
    for (const auto& rd : rounds) {
        rs.push_back(json::parse(rd.ledger_json));
        trajectory += rd.trajectory_row + "\n";
    }
    j["rounds"] = rs;
    j["trajectory_csv"] = trajectory;
    j["almost_packing"] = {{"ell", almost_ell},
                           {"max_exceptions", almost_max_exceptions},
                           {"max_neighbour_hits", almost_max_hits},
                           {"total_exceptions", total_exceptions}};
    j["correction"] = {{"steps", correction.steps},
                       {"min_candidates", correction.min_candidates},
                       {"final_z", correction.z_history.empty() ? 0 : correction.z_history.back()},
                       {"reserve", correction.reserve},
                       {"z_threshold", correction.z_threshold},
                       {"reserve_edges_used", correction.reserve_edges_used},
                       {"reserve_vertices_used", reserve_vertices_used}};
    j["notes"] = notes;
    return j.dump();
}

std::string PackingResult::to_json() const
{
    json j;
    if (ok) {
        json trees = json::array();
        for (std::size_t i = 0; i < maps.size(); ++i)
            trees.push_back({{"id", i}, {"map", maps[i]}});
        j["trees"] = trees;
        j["host_order"] = host_order;
        j["certificate"] = json::parse(certificate.to_json());
    } else {
        j["status"] = "failure";
        j["stage"] = failure_stage;
        j["message"] = failure_message;
        j["seed"] = attempt_seed;
        j["attempt"] = attempt;
        if (correction_failure)
            j["correction_failure"] = json::parse(correction_failure->to_json());
    }
    j["metrics"] = json::parse(metrics_json());
    return j.dump();
}

} // namespace treepack
