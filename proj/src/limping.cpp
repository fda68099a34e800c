#include "treepack/limping.hpp"

#include "treepack/error.hpp"
#include "treepack/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>

namespace treepack {

namespace {

void check_config(const LimpingConfig& cfg)
{
    if (cfg.host == nullptr || cfg.forest == nullptr)
        throw InputError("limping config needs a host and a forest");
    if (!(cfg.alpha > 0.0))
        throw InputError("limping alpha must be positive");
    if (cfg.host->order() < 1 && cfg.forest->order > 0)
        throw InputError("limping host is empty");
}

/// Index of the k-th set bit (0-based) across a word span.
int nth_set_bit(std::span<const Word> words, int k)
{
    for (std::size_t w = 0; w < words.size(); ++w) {
        const int c = std::popcount(words[w]);
        if (k < c) {
            Word bits = words[w];
            for (int i = 0; i < k; ++i)
                bits &= bits - 1;
            return int(w) * kWordBits + std::countr_zero(bits);
        }
        k -= c;
    }
    throw ContractViolation("nth_set_bit past the end");
}

void place_secondaries(const LimpingConfig& cfg, Engine& rng, PartialEmbedding& h)
{
    const HostGraph& g = *cfg.host;
    const LevelForest& f = *cfg.forest;
    const int m = g.order();
    std::vector<int> images;
    std::vector<Word> acc(std::size_t(g.row_words()));
    for (int y = 0; y < f.order; ++y) {
        if (f.role[std::size_t(y)] != VertexRole::Secondary)
            continue;
        const double tau = uniform_unit(rng);
        images.clear();
        for (int x : f.adjacency[std::size_t(y)]) {
            const int hx = h.assignment[std::size_t(x)];
            if (hx >= 0)
                images.push_back(hx);
        }
        if (images.empty())
            throw ContractViolation("secondary vertex " + std::to_string(y) + " has no embedded neighbour");
        std::sort(images.begin(), images.end());
        images.erase(std::unique(images.begin(), images.end()), images.end());

        auto first = g.row(images[0]);
        std::copy(first.begin(), first.end(), acc.begin());
        for (std::size_t i = 1; i < images.size(); ++i) {
            auto r = g.row(images[i]);
            for (std::size_t w = 0; w < acc.size(); ++w)
                acc[w] &= r[w];
        }
        int codeg = 0;
        for (Word w : acc)
            codeg += std::popcount(w);
        if (outside_band(codeg, cfg.density, cfg.alpha, int(images.size()), m) || codeg == 0) {
            h.assignment[std::size_t(y)] = kSkipped;
            h.skipped.push_back(y);
            continue;
        }
        const int index = std::min(int(std::floor(tau * codeg)), codeg - 1);
        h.assignment[std::size_t(y)] = nth_set_bit(acc, index);
    }
}

void finish(const LevelForest& f, PartialEmbedding& h)
{
    for (int v = 0; v < f.order; ++v)
        if (h.assignment[std::size_t(v)] >= 0)
            h.image_vertices.push_back(h.assignment[std::size_t(v)]);
    std::sort(h.image_vertices.begin(), h.image_vertices.end());
    h.image_vertices.erase(std::unique(h.image_vertices.begin(), h.image_vertices.end()), h.image_vertices.end());
    for (int v = 0; v < f.order; ++v) {
        const int hv = h.assignment[std::size_t(v)];
        if (hv < 0)
            continue;
        for (int w : f.adjacency[std::size_t(v)]) {
            const int hw = h.assignment[std::size_t(w)];
            if (v < w && hw >= 0)
                h.image_edges.push_back(ordered_pair(hv, hw));
        }
    }
}

PartialEmbedding blank(const LevelForest& f)
{
    PartialEmbedding h;
    h.assignment.assign(std::size_t(f.order), kUnmapped);
    return h;
}

} // namespace

PartialEmbedding sample_limping(const LimpingConfig& cfg)
{
    check_config(cfg);
    const LevelForest& f = *cfg.forest;
    const auto m = std::uint64_t(cfg.host->order());
    Engine rng = make_engine(cfg.seed);
    PartialEmbedding h = blank(f);
    for (int x = 0; x < f.order; ++x)
        if (f.role[std::size_t(x)] == VertexRole::Primary)
            h.assignment[std::size_t(x)] = int(uniform_below(rng, m));
    place_secondaries(cfg, rng, h);
    finish(f, h);
    return h;
}

PartialEmbedding sample_secondaries(const LimpingConfig& cfg, const std::vector<int>& primary_images)
{
    check_config(cfg);
    const LevelForest& f = *cfg.forest;
    if (int(primary_images.size()) != f.order)
        throw InputError("primary image list length differs from forest order");
    Engine rng = make_engine(cfg.seed);
    PartialEmbedding h = blank(f);
    for (int x = 0; x < f.order; ++x) {
        if (f.role[std::size_t(x)] != VertexRole::Primary)
            continue;
        const int u = primary_images[std::size_t(x)];
        if (u < 0 || u >= cfg.host->order())
            throw InputError("primary image out of range");
        h.assignment[std::size_t(x)] = u;
    }
    place_secondaries(cfg, rng, h);
    finish(f, h);
    return h;
}

int secondary_tuple_cap(const LevelForest& f)
{
    int cap = 1;
    for (int y = 0; y < f.order; ++y) {
        if (f.role[std::size_t(y)] != VertexRole::Secondary)
            continue;
        int k = 0;
        for (int x : f.adjacency[std::size_t(y)])
            if (f.role[std::size_t(x)] != VertexRole::Root)
                ++k;
        cap = std::max(cap, k);
    }
    return cap;
}

std::vector<int> vertex_collisions(const PartialEmbedding& h)
{
    std::vector<std::pair<int, int>> by_image;
    for (int v = 0; v < int(h.assignment.size()); ++v)
        if (h.assignment[std::size_t(v)] >= 0)
            by_image.emplace_back(h.assignment[std::size_t(v)], v);
    std::sort(by_image.begin(), by_image.end());
    std::vector<int> out;
    for (std::size_t i = 0; i < by_image.size();) {
        std::size_t j = i;
        while (j < by_image.size() && by_image[j].first == by_image[i].first)
            ++j;
        if (j - i >= 2)
            for (std::size_t k = i; k < j; ++k)
                out.push_back(by_image[k].second);
        i = j;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------

bool DistributionReport::all_pass() const
{
    return std::all_of(claims.begin(), claims.end(), [](const Claim& c) { return c.pass; });
}

const Claim* DistributionReport::find(const std::string& name) const
{
    for (const auto& c : claims)
        if (c.name == name)
            return &c;
    return nullptr;
}

std::string DistributionReport::to_json() const
{
    nlohmann::ordered_json j;
    j["trials"] = trials;
    j["host_order"] = host_order;
    j["forest_order"] = forest_order;
    j["density"] = density;
    j["alpha"] = alpha;
    j["delta"] = delta;
    j["claims"] = nlohmann::ordered_json::object();
    for (const auto& c : claims) {
        nlohmann::ordered_json cj;
        cj["estimate"] = c.estimate;
        if (c.lower)
            cj["lower"] = *c.lower;
        cj["bound"] = c.bound;
        cj["stderr"] = c.stderr_;
        cj["pass"] = c.pass;
        j["claims"][c.name] = cj;
    }
    j["pass"] = all_pass();
    return j.dump(2);
}

double chi_square_critical_1e3(int df)
{
    // Standard normal quantile for upper tail 10^-3.
    constexpr double z = 3.090232306167813;
    const double k = double(df);
    const double a = 2.0 / (9.0 * k);
    return k * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

DistributionReport estimate_lemma_bounds(const LimpingConfig& cfg, std::uint64_t trials)
{
    check_config(cfg);
    if (trials < 1000)
        throw InputError("estimate_lemma_bounds needs at least 1000 trials");
    const HostGraph& g = *cfg.host;
    const LevelForest& f = *cfg.forest;
    if (f.order > 100 || g.order() > 500)
        throw InputError("estimate_lemma_bounds is limited to v(F) <= 100 and m <= 500");
    const int m = g.order();
    const double d = cfg.density;
    const double T = double(trials);

    std::vector<int> live;
    int delta = 1;
    for (int v = 0; v < f.order; ++v) {
        if (f.role[std::size_t(v)] == VertexRole::Root)
            continue;
        live.push_back(v);
        int k = 0;
        for (int w : f.adjacency[std::size_t(v)])
            if (f.role[std::size_t(w)] != VertexRole::Root)
                ++k;
        delta = std::max(delta, k);
    }
    const int vf = int(live.size());

    int primary = -1;
    for (int v : live)
        if (f.role[std::size_t(v)] == VertexRole::Primary) {
            primary = v;
            break;
        }
    // First primary-secondary forest edge, and a fixed host edge for claim (d).
    int ex = -1, ey = -1;
    for (int v : live) {
        if (f.role[std::size_t(v)] != VertexRole::Primary)
            continue;
        for (int w : f.adjacency[std::size_t(v)])
            if (f.role[std::size_t(w)] == VertexRole::Secondary) {
                ex = v;
                ey = w;
                break;
            }
        if (ex >= 0)
            break;
    }
    int hu = -1, hv = -1;
    for (int u = 0; u < m && hu < 0; ++u)
        for (int w = 0; w < m; ++w)
            if (g.has_edge(u, w)) {
                hu = u;
                hv = w;
                break;
            }

    std::vector<std::uint64_t> primary_hits(std::size_t(m), 0);
    std::vector<std::uint64_t> skip_hits(std::size_t(f.order), 0);
    std::uint64_t edge_hits = 0;
    std::vector<std::uint64_t> pair_cells;
    pair_cells.reserve(std::size_t(trials));
    double vc_sum = 0.0;
    double vc_sq = 0.0;

    LimpingConfig trial_cfg = cfg;
    for (std::uint64_t t = 0; t < trials; ++t) {
        trial_cfg.seed = derive_seed(cfg.seed, {t});
        const PartialEmbedding h = sample_limping(trial_cfg);
        if (primary >= 0)
            ++primary_hits[std::size_t(h.assignment[std::size_t(primary)])];
        for (int y : h.skipped)
            ++skip_hits[std::size_t(y)];
        if (ex >= 0 && hu >= 0 && h.assignment[std::size_t(ex)] == hu && h.assignment[std::size_t(ey)] == hv)
            ++edge_hits;
        if (vf >= 2) {
            const int a = h.assignment[std::size_t(live[0])];
            const int b = h.assignment[std::size_t(live[1])];
            if (a >= 0 && b >= 0)
                pair_cells.push_back(std::uint64_t(a) * std::uint64_t(m) + std::uint64_t(b));
        }
        const double vc = double(vertex_collisions(h).size());
        vc_sum += vc;
        vc_sq += vc * vc;
    }

    DistributionReport rep;
    rep.trials = trials;
    rep.host_order = m;
    rep.forest_order = vf;
    rep.density = d;
    rep.alpha = cfg.alpha;
    rep.delta = delta;

    if (primary >= 0) {
        const double expect = T / m;
        double chi2 = 0.0;
        for (auto c : primary_hits)
            chi2 += (double(c) - expect) * (double(c) - expect) / expect;
        Claim c{"primary_uniform_chi2", chi2, std::nullopt, chi_square_critical_1e3(std::max(1, m - 1)),
                std::sqrt(2.0 * std::max(1, m - 1)), false};
        c.pass = m == 1 || c.estimate <= c.bound;
        rep.claims.push_back(c);
    }
    {
        double worst = 0.0;
        for (int v : live)
            if (f.role[std::size_t(v)] == VertexRole::Secondary)
                worst = std::max(worst, double(skip_hits[std::size_t(v)]) / T);
        Claim c{"skip_probability", worst, std::nullopt, cfg.alpha,
                std::sqrt(cfg.alpha * (1.0 - std::min(cfg.alpha, 1.0)) / T), false};
        c.pass = c.estimate <= c.bound + kClaimSigmas * c.stderr_;
        rep.claims.push_back(c);
    }
    if (ex >= 0 && hu >= 0) {
        const double a = cfg.alpha * std::pow(2.0 / d, delta);
        const double base = 1.0 / (d * double(m) * double(m));
        const double lo = std::pow(1.0 - a, delta + 2) * base;
        const double hi = std::pow(1.0 + a, delta + 2) * base;
        Claim c{"edge_probability", double(edge_hits) / T, lo, hi, std::sqrt(base * (1.0 - base) / T), false};
        c.pass = c.estimate >= lo - kClaimSigmas * c.stderr_ && c.estimate <= hi + kClaimSigmas * c.stderr_;
        rep.claims.push_back(c);
    }
    if (vf >= 2) {
        std::sort(pair_cells.begin(), pair_cells.end());
        std::uint64_t best = 0;
        for (std::size_t i = 0; i < pair_cells.size();) {
            std::size_t j = i;
            while (j < pair_cells.size() && pair_cells[j] == pair_cells[i])
                ++j;
            best = std::max<std::uint64_t>(best, j - i);
            i = j;
        }
        const double bound = std::pow(2.0 / d, 4.0 * delta * delta) / (double(m) * double(m));
        const double p = std::min(bound, 1.0);
        Claim c{"pairwise_placement", double(best) / T, std::nullopt, bound, std::sqrt(p * (1.0 - p) / T), false};
        c.pass = c.estimate <= c.bound + kClaimSigmas * c.stderr_;
        rep.claims.push_back(c);
    }
    {
        const double mean = vc_sum / T;
        const double var = std::max(0.0, vc_sq / T - mean * mean);
        const double bound = 2.0 * double(vf) * double(vf) / (std::pow(d, delta) * double(m));
        Claim c{"mean_vertex_collisions", mean, std::nullopt, bound, std::sqrt(var / T), false};
        c.pass = c.estimate <= c.bound + kClaimSigmas * c.stderr_;
        rep.claims.push_back(c);
    }
    return rep;
}

} // namespace treepack
