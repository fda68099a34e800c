#include "treepack/validate.hpp"

#include "treepack/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <limits>

namespace treepack {

namespace {

struct PairUse {
    int a, b, tree, child;
    auto operator<=>(const PairUse&) const = default;
};

void fail(Certificate& cert, CheckResult& check, Witness w, std::string detail)
{
    if (!check.pass)
        return;
    check.pass = false;
    check.detail = std::move(detail);
    cert.valid = false;
    if (!cert.witness)
        cert.witness = std::move(w);
}

// Shared by both validators: `maps` entries equal to `skip` are ignored.
void check_maps(Certificate& cert, const std::vector<std::vector<int>>& maps, const std::vector<RootedTree>& trees,
                int host_order, int skip, const std::string& clause)
{
    CheckResult inj{clause + "injective", true, ""};
    CheckResult pres{clause + "edge_preserving", true, ""};
    CheckResult disj{clause + "edge_disjoint", true, ""};

    std::vector<PairUse> uses;
    std::vector<int> owner(std::size_t(std::max(host_order, 0)), -1);
    for (std::size_t i = 0; i < trees.size(); ++i) {
        const auto& map = maps[i];
        std::fill(owner.begin(), owner.end(), -1);
        for (int x = 0; x < int(map.size()); ++x) {
            const int v = map[std::size_t(x)];
            if (v == skip)
                continue;
            int& o = owner[std::size_t(v)];
            if (o >= 0) {
                Witness w{clause + "injective", int(i), -1, o, x, v, -1};
                fail(cert, inj, w,
                     "tree " + std::to_string(i) + " sends vertices " + std::to_string(o) + " and " +
                         std::to_string(x) + " to " + std::to_string(v));
            } else {
                o = x;
            }
        }
        const auto& par = trees[i].parents();
        for (int x = 0; x < int(par.size()); ++x) {
            const int p = par[std::size_t(x)];
            if (p < 0 || map[std::size_t(x)] == skip || map[std::size_t(p)] == skip)
                continue;
            const int a = map[std::size_t(x)], b = map[std::size_t(p)];
            if (a == b) {
                Witness w{clause + "edge_preserving", int(i), -1, x, p, a, b};
                fail(cert, pres, w, "tree " + std::to_string(i) + " maps edge " + std::to_string(x) + "-" +
                                        std::to_string(p) + " onto a loop");
                continue;
            }
            uses.push_back({std::min(a, b), std::max(a, b), int(i), x});
        }
    }
    std::sort(uses.begin(), uses.end());
    for (std::size_t k = 1; k < uses.size(); ++k) {
        if (uses[k].a == uses[k - 1].a && uses[k].b == uses[k - 1].b) {
            Witness w{clause + "edge_disjoint", uses[k - 1].tree, uses[k].tree, uses[k - 1].child, uses[k].child,
                      uses[k].a, uses[k].b};
            fail(cert, disj, w,
                 "pair {" + std::to_string(uses[k].a) + "," + std::to_string(uses[k].b) + "} used by trees " +
                     std::to_string(uses[k - 1].tree) + " and " + std::to_string(uses[k].tree));
            break;
        }
    }
    cert.checks.push_back(inj);
    cert.checks.push_back(pres);
    cert.checks.push_back(disj);
}

void check_shapes(const std::vector<std::vector<int>>& maps, const std::vector<RootedTree>& trees, int host_order,
                  bool allow_excepted)
{
    if (maps.size() != trees.size())
        throw InputError("got " + std::to_string(maps.size()) + " maps for " + std::to_string(trees.size()) +
                         " trees");
    for (std::size_t i = 0; i < trees.size(); ++i) {
        if (int(maps[i].size()) != trees[i].order())
            throw InputError("map " + std::to_string(i) + " has length " + std::to_string(maps[i].size()) +
                             ", tree order is " + std::to_string(trees[i].order()));
        for (std::size_t x = 0; x < maps[i].size(); ++x) {
            const int v = maps[i][x];
            if (allow_excepted && v == kExcepted)
                continue;
            if (v < 0 || v >= host_order)
                throw InputError("map " + std::to_string(i) + " sends vertex " + std::to_string(x) + " to " +
                                 std::to_string(v) + ", outside [0, " + std::to_string(host_order) + ")");
        }
    }
}

} // namespace

std::string Certificate::to_json() const
{
    using json = nlohmann::ordered_json;
    json j;
    j["valid"] = valid;
    json cs = json::array();
    for (const auto& c : checks)
        cs.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = cs;
    if (witness)
        j["witness"] = {{"clause", witness->clause},       {"tree", witness->tree},
                        {"other_tree", witness->other_tree}, {"vertex", witness->vertex},
                        {"other_vertex", witness->other_vertex}, {"host_a", witness->host_a},
                        {"host_b", witness->host_b}};
    else
        j["witness"] = nullptr;
    return j.dump();
}

Certificate validate_packing(const std::vector<std::vector<int>>& maps, const std::vector<RootedTree>& trees,
                             int host_order)
{
    check_shapes(maps, trees, host_order, false);
    Certificate cert;
    // No map entry can equal INT_MIN, so nothing is skipped.
    check_maps(cert, maps, trees, host_order, std::numeric_limits<int>::min(), "");
    return cert;
}

std::vector<int> neighbour_hits_brute(const AlmostPacking& ap, const std::vector<RootedTree>& trees)
{
    std::vector<int> hits(std::size_t(ap.m), 0);
    for (int v = 0; v < ap.m; ++v)
        for (std::size_t j = 0; j < trees.size(); ++j)
            for (int x = 0; x < trees[j].order(); ++x) {
                if (ap.maps[j][std::size_t(x)] != v)
                    continue;
                bool touches = false;
                for (int y = 0; y < trees[j].order(); ++y) {
                    const bool adjacent = trees[j].parent(x) == y || trees[j].parent(y) == x;
                    if (adjacent && ap.maps[j][std::size_t(y)] == kExcepted)
                        touches = true;
                }
                hits[std::size_t(v)] += touches;
            }
    return hits;
}

AlmostCertificate validate_almost_packing(const AlmostPacking& ap, const std::vector<RootedTree>& trees,
                                          std::optional<int> ell_limit)
{
    check_shapes(ap.maps, trees, ap.m, true);
    AlmostCertificate out;
    Certificate& cert = out.certificate;

    CheckResult consistent{"exceptions_match_map", true, ""};
    if (ap.exceptions.size() != trees.size()) {
        fail(cert, consistent, Witness{"exceptions_match_map"}, "wrong number of exception sets");
    } else {
        for (std::size_t i = 0; i < trees.size() && consistent.pass; ++i) {
            std::vector<int> from_map;
            for (int x = 0; x < trees[i].order(); ++x)
                if (ap.maps[i][std::size_t(x)] == kExcepted)
                    from_map.push_back(x);
            std::vector<int> listed = ap.exceptions[i];
            std::sort(listed.begin(), listed.end());
            if (listed != from_map)
                fail(cert, consistent, Witness{"exceptions_match_map", int(i)},
                     "tree " + std::to_string(i) + " lists R differently from its map");
        }
    }
    cert.checks.push_back(consistent);

    check_maps(cert, ap.maps, trees, ap.m, kExcepted, "a_");

    int max_r = 0, max_r_tree = -1;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        int r = 0;
        for (int v : ap.maps[i])
            r += v == kExcepted;
        if (r > max_r) {
            max_r = r;
            max_r_tree = int(i);
        }
    }
    std::vector<int> hits(std::size_t(ap.m), 0);
    int max_delta = 0;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        const auto& par = trees[i].parents();
        const auto& map = ap.maps[i];
        max_delta = std::max(max_delta, trees[i].max_degree());
        std::vector<char> touches(par.size(), 0);
        for (int x = 0; x < int(par.size()); ++x) {
            const int p = par[std::size_t(x)];
            if (p < 0)
                continue;
            if (map[std::size_t(p)] == kExcepted)
                touches[std::size_t(x)] = 1;
            if (map[std::size_t(x)] == kExcepted)
                touches[std::size_t(p)] = 1;
        }
        for (int x = 0; x < int(par.size()); ++x)
            if (touches[std::size_t(x)] && map[std::size_t(x)] != kExcepted)
                ++hits[std::size_t(map[std::size_t(x)])];
    }
    int max_hits = 0, max_hits_vertex = -1;
    for (int v = 0; v < ap.m; ++v)
        if (hits[std::size_t(v)] > max_hits) {
            max_hits = hits[std::size_t(v)];
            max_hits_vertex = v;
        }
    out.max_exceptions = max_r;
    out.max_neighbour_hits = max_hits;
    out.ell = std::max(max_r, max_hits);
    out.derived_y_bound = std::int64_t(max_delta) * max_delta * max_hits;

    CheckResult b{"b_exception_size", true, "max |R_i| = " + std::to_string(max_r)};
    CheckResult c{"c_neighbour_hits", true, "max hits = " + std::to_string(max_hits)};
    if (ell_limit && max_r > *ell_limit)
        fail(cert, b, Witness{"b_exception_size", max_r_tree}, b.detail + " > " + std::to_string(*ell_limit));
    if (ell_limit && max_hits > *ell_limit) {
        Witness w{"c_neighbour_hits"};
        w.host_a = max_hits_vertex;
        fail(cert, c, w, c.detail + " > " + std::to_string(*ell_limit));
    }
    cert.checks.push_back(b);
    cert.checks.push_back(c);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

class PackSearch {
public:
    PackSearch(const std::vector<RootedTree>& trees, int n, std::uint64_t budget) : trees_(trees), n_(n), budget_(budget)
    {
        for (const auto& t : trees)
            orders_.push_back(t.preorder());
        maps_.resize(trees.size());
        for (std::size_t i = 0; i < trees.size(); ++i)
            maps_[i].assign(std::size_t(trees[i].order()), -1);
    }

    bool run() { return place(0, 0, 0); }
    std::uint64_t nodes() const { return nodes_; }
    const std::vector<std::vector<int>>& maps() const { return maps_; }

private:
    int edge_bit(int a, int b) const { return a < b ? a * n_ + b : b * n_ + a; }

    bool place(std::size_t tree, std::size_t k, std::uint32_t tree_used)
    {
        if (tree == trees_.size())
            return true;
        if (k == orders_[tree].size())
            return place(tree + 1, 0, 0);
        if (++nodes_ > budget_)
            throw CapabilityError("packing oracle exceeded its budget of " + std::to_string(budget_) + " nodes");
        const int x = orders_[tree][k];
        const int p = trees_[tree].parent(x);
        // K_n is vertex-transitive, so the very first vertex can be fixed.
        const int limit = (tree == 0 && k == 0) ? 1 : n_;
        for (int v = 0; v < limit; ++v) {
            if (tree_used & (1U << v))
                continue;
            int bit = -1;
            if (p >= 0) {
                bit = edge_bit(maps_[tree][std::size_t(p)], v);
                if (used_[std::size_t(bit)])
                    continue;
                used_[std::size_t(bit)] = 1;
            }
            maps_[tree][std::size_t(x)] = v;
            if (place(tree, k + 1, tree_used | (1U << v)))
                return true;
            maps_[tree][std::size_t(x)] = -1;
            if (bit >= 0)
                used_[std::size_t(bit)] = 0;
        }
        return false;
    }

    const std::vector<RootedTree>& trees_;
    int n_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    std::vector<std::vector<int>> orders_;
    std::vector<std::vector<int>> maps_;
    std::array<char, kOracleMaxHost * kOracleMaxHost> used_{};
};

} // namespace

OracleResult exhaustive_pack_oracle(const std::vector<RootedTree>& trees, int host_order, std::uint64_t node_budget)
{
    if (host_order < 1 || host_order > kOracleMaxHost)
        throw CapabilityError("packing oracle supports host orders 1.." + std::to_string(kOracleMaxHost) + ", got " +
                              std::to_string(host_order));
    OracleResult res;
    std::int64_t edges = 0;
    for (const auto& t : trees) {
        if (t.order() > host_order)
            return res;
        edges += t.edge_count();
    }
    if (edges > std::int64_t(host_order) * (host_order - 1) / 2)
        return res;
    PackSearch search(trees, host_order, node_budget);
    res.exists = search.run();
    res.nodes = search.nodes();
    if (res.exists)
        res.maps = search.maps();
    return res;
}

} // namespace treepack
