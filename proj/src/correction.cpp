#include "treepack/correction.hpp"

#include "treepack/error.hpp"
#include "treepack/graph.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>

namespace treepack {

namespace {

class BitRows {
public:
    BitRows(int rows, int bits) : words_(words_for(bits)), data_(std::size_t(rows) * std::size_t(words_), 0) {}

    Word* row(int r) { return data_.data() + std::size_t(r) * std::size_t(words_); }
    const Word* row(int r) const { return data_.data() + std::size_t(r) * std::size_t(words_); }
    int words() const { return words_; }

    void set(int r, int b) { row(r)[b / kWordBits] |= Word(1) << (b % kWordBits); }
    bool test(int r, int b) const { return (row(r)[b / kWordBits] >> (b % kWordBits)) & 1U; }

private:
    int words_;
    std::vector<Word> data_;
};

int popcount_words(const std::vector<Word>& v)
{
    int c = 0;
    for (Word w : v)
        c += std::popcount(w);
    return c;
}

int first_set(const std::vector<Word>& v)
{
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i])
            return int(i) * kWordBits + std::countr_zero(v[i]);
    return -1;
}

// max(max_i |R_i|, max_v #{x mapped to v with a neighbour in R}).
int achieved_ell(const AlmostPacking& ap, const std::vector<RootedTree>& trees)
{
    int ell = 0;
    std::vector<int> hits(std::size_t(ap.m), 0);
    for (std::size_t i = 0; i < trees.size(); ++i) {
        ell = std::max(ell, int(ap.exceptions[i].size()));
        const auto adj = trees[i].adjacency();
        for (int x = 0; x < trees[i].order(); ++x) {
            const int v = ap.maps[i][std::size_t(x)];
            if (v == kExcepted)
                continue;
            for (int y : adj[std::size_t(x)])
                if (ap.maps[i][std::size_t(y)] == kExcepted) {
                    ++hits[std::size_t(v)];
                    break;
                }
        }
    }
    for (int h : hits)
        ell = std::max(ell, h);
    return ell;
}

} // namespace

AlmostPacking make_almost_packing(int m, std::vector<std::vector<int>> maps)
{
    AlmostPacking ap;
    ap.m = m;
    ap.maps = std::move(maps);
    for (const auto& map : ap.maps) {
        std::vector<int> r;
        for (int x = 0; x < int(map.size()); ++x)
            if (map[std::size_t(x)] == kExcepted)
                r.push_back(x);
        ap.exceptions.push_back(std::move(r));
    }
    return ap;
}

std::string CorrectionFailure::to_json() const
{
    nlohmann::ordered_json j;
    j["tree"] = tree;
    j["step"] = step;
    j["x_size"] = x_size;
    j["y_size"] = y_size;
    j["z_size"] = z_size;
    j["u_size"] = u_size;
    j["reserve"] = reserve;
    j["epsilon"] = epsilon;
    j["ell_achieved"] = ell_achieved;
    return j.dump();
}

double correction_candidate_bound(double epsilon, int m, int delta, double ell)
{
    const double em = epsilon * m;
    return em - ell - double(delta) * delta * ell - em / 8.0 - em / 2.0;
}

double correction_ell_limit(double epsilon, int m, int delta)
{
    return epsilon * epsilon * m / (64.0 * delta * delta);
}

CorrectionResult correct(const AlmostPacking& ap, const std::vector<RootedTree>& trees, const CorrectionConfig& cfg)
{
    const int m = ap.m;
    if (m < 1)
        throw InputError("correction needs a core of order >= 1");
    if (!(cfg.epsilon > 0.0))
        throw InputError("correction needs epsilon > 0");
    if (ap.maps.size() != trees.size() || ap.exceptions.size() != trees.size())
        throw InputError("almost packing has " + std::to_string(ap.maps.size()) + " maps for " +
                         std::to_string(trees.size()) + " trees");
    const int w_size = cfg.reserve_size.value_or(int(std::floor(cfg.epsilon * m)));
    if (w_size < 0)
        throw InputError("reserve size must be non-negative");
    const double z_threshold = cfg.z_threshold.value_or(cfg.epsilon * m / 2.0);

    CorrectionResult res;
    res.host_order = m + w_size;
    res.maps = ap.maps;
    res.placement_order.resize(trees.size());
    res.stats.reserve = w_size;
    res.stats.z_threshold = z_threshold;

    for (std::size_t i = 0; i < trees.size(); ++i) {
        const auto& map = ap.maps[i];
        if (int(map.size()) != trees[i].order())
            throw InputError("map of tree " + std::to_string(i) + " has the wrong length");
        std::vector<char> in_r(map.size(), 0);
        for (int x : ap.exceptions[i]) {
            if (x < 0 || x >= trees[i].order() || map[std::size_t(x)] != kExcepted)
                throw InputError("exception set of tree " + std::to_string(i) + " disagrees with its map");
            in_r[std::size_t(x)] = 1;
        }
        for (std::size_t x = 0; x < map.size(); ++x) {
            if (map[x] == kExcepted && !in_r[x])
                throw InputError("tree " + std::to_string(i) + " has an unmapped vertex outside R");
            if (map[x] != kExcepted && (map[x] < 0 || map[x] >= m))
                throw InputError("tree " + std::to_string(i) + " maps vertex " + std::to_string(x) +
                                 " outside the core");
        }
        if (!ap.exceptions[i].empty() && int(ap.exceptions[i].size()) == trees[i].order())
            throw InputError("tree " + std::to_string(i) + " has no vertex outside R");
    }

    const int words = words_for(w_size);
    BitRows core_used(m, w_size);          // committed core-reserve pairs of earlier trees
    BitRows reserve_used(w_size, w_size);  // E_{i,t}
    std::vector<int> reserve_degree(std::size_t(w_size), 0);
    std::vector<Word> z_mask(std::size_t(words), 0);
    int z_count = 0;
    std::vector<Word> full(std::size_t(words), ~Word(0));
    if (w_size % kWordBits)
        full.back() = (Word(1) << (w_size % kWordBits)) - 1;
    if (words == 0)
        full.clear();

    auto add_reserve_edge = [&](int a, int b) {
        reserve_used.set(a, b);
        reserve_used.set(b, a);
        ++res.stats.reserve_edges_used;
        for (int v : {a, b}) {
            ++reserve_degree[std::size_t(v)];
            const Word bit = Word(1) << (v % kWordBits);
            if (double(reserve_degree[std::size_t(v)]) >= z_threshold && !(z_mask[std::size_t(v / kWordBits)] & bit)) {
                z_mask[std::size_t(v / kWordBits)] |= bit;
                ++z_count;
            }
        }
    };

    for (std::size_t i = 0; i < trees.size(); ++i) {
        const auto& R = ap.exceptions[i];
        if (R.empty())
            continue;
        const RootedTree& t = trees[i];
        const auto adj = t.adjacency();
        auto& out = res.maps[i];
        std::vector<char> in_r(std::size_t(t.order()), 0);
        for (int x : R)
            in_r[std::size_t(x)] = 1;

        int root = 0;
        while (in_r[std::size_t(root)])
            ++root;
        std::vector<int> bfs_parent(std::size_t(t.order()), -1);
        std::vector<int> order;
        std::vector<char> seen(std::size_t(t.order()), 0);
        std::deque<int> queue{root};
        seen[std::size_t(root)] = 1;
        while (!queue.empty()) {
            const int x = queue.front();
            queue.pop_front();
            order.push_back(x);
            for (int y : adj[std::size_t(x)])
                if (!seen[std::size_t(y)]) {
                    seen[std::size_t(y)] = 1;
                    bfs_parent[std::size_t(y)] = x;
                    queue.push_back(y);
                }
        }

        std::vector<Word> x_mask(std::size_t(words), 0);
        std::vector<VertexPair> pending; // (core, reserve-local)
        int step = 0;
        for (int x : order) {
            if (!in_r[std::size_t(x)])
                continue;
            ++step;
            std::vector<Word> y_mask(std::size_t(words), 0);
            for (int y : adj[std::size_t(x)]) {
                if (in_r[std::size_t(y)])
                    continue;
                const Word* row = core_used.row(out[std::size_t(y)]);
                for (int k = 0; k < words; ++k)
                    y_mask[std::size_t(k)] |= row[k];
            }
            std::vector<Word> u_mask(std::size_t(words), 0);
            const int par = bfs_parent[std::size_t(x)];
            if (par >= 0 && in_r[std::size_t(par)]) {
                const Word* row = reserve_used.row(out[std::size_t(par)] - m);
                std::copy(row, row + words, u_mask.begin());
            }
            std::vector<Word> cand = full;
            for (int k = 0; k < words; ++k)
                cand[std::size_t(k)] &= ~(x_mask[std::size_t(k)] | y_mask[std::size_t(k)] | z_mask[std::size_t(k)] |
                                          u_mask[std::size_t(k)]);
            const int available = popcount_words(cand);
            res.stats.z_history.push_back(z_count);
            if (res.stats.min_candidates < 0 || available < res.stats.min_candidates)
                res.stats.min_candidates = available;
            ++res.stats.steps;
            if (available == 0) {
                CorrectionFailure f;
                f.tree = int(i);
                f.step = step;
                f.x_size = popcount_words(x_mask);
                f.y_size = popcount_words(y_mask);
                f.z_size = z_count;
                f.u_size = popcount_words(u_mask);
                f.reserve = w_size;
                f.epsilon = cfg.epsilon;
                f.ell_achieved = achieved_ell(ap, trees);
                res.ok = false;
                res.failure = f;
                return res;
            }
            const int w = first_set(cand);
            out[std::size_t(x)] = m + w;
            res.placement_order[i].push_back(x);
            x_mask[std::size_t(w / kWordBits)] |= Word(1) << (w % kWordBits);
            for (int y : adj[std::size_t(x)])
                if (!in_r[std::size_t(y)])
                    pending.emplace_back(out[std::size_t(y)], w);
            if (par >= 0 && in_r[std::size_t(par)])
                add_reserve_edge(out[std::size_t(par)] - m, w);
        }
        for (auto [v, w] : pending)
            core_used.set(v, w);
    }
    return res;
}

} // namespace treepack
