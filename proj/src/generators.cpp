#include "treepack/error.hpp"
#include "treepack/rng.hpp"
#include "treepack/tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace treepack {

RootedTree random_bounded_degree_tree(int order, int delta, std::uint64_t seed)
{
    if (order < 1)
        throw InputError("tree order must be >= 1");
    if (delta < 1 || (delta == 1 && order > 2))
        throw InputError("delta = " + std::to_string(delta) + " cannot reach order " + std::to_string(order));
    Engine rng = make_engine(seed);
    std::vector<int> parent(std::size_t(order), -1);
    std::vector<int> degree(std::size_t(order), 0);
    // Vertices with spare degree, maintained with swap-removal.
    std::vector<int> open{0};
    std::vector<int> slot(std::size_t(order), -1);
    slot[0] = 0;
    auto close = [&](int v) {
        const int i = slot[std::size_t(v)];
        const int last = open.back();
        open[std::size_t(i)] = last;
        slot[std::size_t(last)] = i;
        open.pop_back();
        slot[std::size_t(v)] = -1;
    };
    for (int v = 1; v < order; ++v) {
        const int p = open[std::size_t(uniform_below(rng, open.size()))];
        parent[std::size_t(v)] = p;
        if (++degree[std::size_t(p)] >= delta)
            close(p);
        degree[std::size_t(v)] = 1;
        if (delta > 1) {
            slot[std::size_t(v)] = int(open.size());
            open.push_back(v);
        }
    }
    return RootedTree(std::move(parent), 0);
}

RootedTree regular_tree(int delta, int depth)
{
    if (delta < 2)
        throw InputError("regular tree needs delta >= 2");
    if (depth < 0)
        throw InputError("regular tree depth must be >= 0");
    std::vector<int> parent{-1};
    std::vector<int> frontier{0};
    for (int d = 0; d < depth; ++d) {
        std::vector<int> next;
        for (int v : frontier) {
            const int kids = v == 0 ? delta : delta - 1;
            for (int c = 0; c < kids; ++c) {
                next.push_back(int(parent.size()));
                parent.push_back(v);
            }
        }
        frontier = std::move(next);
        if (parent.size() > 50'000'000)
            throw InputError("regular tree too large");
    }
    return RootedTree(std::move(parent), 0);
}

RootedTree modify_regular_tree(const RootedTree& t)
{
    int chopped = -1;
    int host = -1;
    for (int v = 0; v < t.order(); ++v) {
        if (v == t.root() || t.degree(v) != 1)
            continue;
        if (chopped < 0)
            chopped = v;
        host = v;
    }
    if (chopped < 0 || host == chopped)
        throw InputError("tree needs two non-root leaves to be modified");
    std::vector<int> parent = t.parents();
    parent[std::size_t(chopped)] = host;
    return RootedTree(std::move(parent), t.root());
}

int star_family_order(int n, double epsilon)
{
    return int(std::floor((0.5 + 2.0 * std::sqrt(epsilon)) * n + 1e-9)) + 1;
}

TreeFamily generate_counterexample_family(const ModifiedRegular& spec)
{
    if (spec.delta < 3 || spec.delta % 2 == 0)
        throw InputError("modified_regular needs odd delta >= 3");
    if (spec.depth < 2)
        throw InputError("modified_regular needs depth >= 2");
    const RootedTree base = regular_tree(spec.delta, spec.depth);
    const int n = base.order();
    if (n % 2 != 0)
        throw ContractViolation("regular tree of odd degree has odd order");
    TreeFamily fam;
    fam.n = n;
    fam.delta = spec.delta;
    fam.trees.assign(std::size_t(n / 2), base);
    fam.trees[0] = modify_regular_tree(base);
    return fam;
}

TreeFamily generate_counterexample_family(const StarFamily& spec)
{
    if (!(spec.epsilon > 0.0 && spec.epsilon < 1e-3))
        throw InputError("star_family needs epsilon in (0, 1e-3)");
    if (spec.n < 2)
        throw InputError("star_family needs n >= 2");
    const int order = star_family_order(spec.n, spec.epsilon);
    const double pairs = double(spec.n) * (spec.n - 1) / 2.0;
    const int count = int(std::floor(pairs / ((0.5 + 2.0 * std::sqrt(spec.epsilon)) * spec.n)));
    TreeFamily fam;
    fam.n = spec.n;
    fam.delta = order - 1;
    fam.trees.assign(std::size_t(count), RootedTree::star(order));
    return fam;
}

// ---------------------------------------------------------------------------

namespace {

struct Descriptor {
    std::string kind;
    std::map<std::string, std::string> args;

    bool has(const std::string& k) const { return args.count(k) != 0; }

    long long integer(const std::string& k) const
    {
        auto it = args.find(k);
        if (it == args.end())
            throw InputError("generator '" + kind + "' needs " + k + "=");
        try {
            std::size_t used = 0;
            long long v = std::stoll(it->second, &used);
            if (used != it->second.size())
                throw InputError("");
            return v;
        } catch (const std::exception&) {
            throw InputError("generator argument " + k + "=" + it->second + " is not an integer");
        }
    }

    long long integer(const std::string& k, long long fallback) const { return has(k) ? integer(k) : fallback; }

    std::string text(const std::string& k, const std::string& fallback) const
    {
        auto it = args.find(k);
        return it == args.end() ? fallback : it->second;
    }
};

Descriptor parse_descriptor(const std::string& s)
{
    Descriptor d;
    const auto colon = s.find(':');
    d.kind = s.substr(0, colon);
    if (colon == std::string::npos)
        return d;
    std::istringstream in(s.substr(colon + 1));
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw InputError("generator argument '" + item + "' is not key=value");
        d.args[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return d;
}

/// Edge budget: explicit number, "full" for C(n,2), or unlimited when absent.
std::int64_t edge_budget(const Descriptor& d, int n)
{
    const std::int64_t full = std::int64_t(n) * (n - 1) / 2;
    if (!d.has("budget"))
        return full;
    if (d.text("budget", "") == "full")
        return full;
    const long long b = d.integer("budget");
    if (b < 0 || b > full)
        throw InputError("edge budget must lie in [0, C(n,2)]");
    return b;
}

/// Appends trees produced by make(order, index) until the count is reached or
/// the edge budget is exhausted. Orders are drawn from [lo, hi] when lo < hi.
template <class Make>
void fill_family(TreeFamily& fam, const Descriptor& d, int lo, int hi, std::uint64_t seed, Make make)
{
    const std::int64_t budget = edge_budget(d, fam.n);
    const long long count = d.integer("count", -1);
    if (!d.has("count") && !d.has("budget"))
        throw InputError("generator '" + d.kind + "' needs count= or budget=");
    if (lo < 1 || lo > hi || hi > fam.n)
        throw InputError("generator order range invalid for n = " + std::to_string(fam.n));
    Engine rng = make_engine(derive_seed(seed, {0}));
    std::int64_t used = 0;
    for (long long i = 0; count < 0 || i < count; ++i) {
        int order = lo + int(uniform_below(rng, std::uint64_t(hi - lo + 1)));
        const std::int64_t left = budget - used;
        if (left < lo - 1)
            break;
        order = int(std::min<std::int64_t>(order, left + 1));
        fam.trees.push_back(make(order, std::uint64_t(i)));
        used += order - 1;
        if (order == 1 && count < 0)
            break;
    }
    if (count >= 0 && (long long)fam.trees.size() < count)
        throw InputError("edge budget allows only " + std::to_string(fam.trees.size()) + " of " +
                         std::to_string(count) + " trees");
}

RootedTree caterpillar(int order, int delta, Engine& rng)
{
    if (delta < 2 && order > 2)
        throw InputError("caterpillar needs delta >= 2");
    std::vector<int> parent{-1};
    std::vector<int> spine{0};
    while (int(parent.size()) < order) {
        const int tail = spine.back();
        // Hang a random number of legs on the tail, then extend the spine.
        const int spare = delta - (tail == 0 ? 1 : 2);
        const int legs = spare > 0 ? int(uniform_below(rng, std::uint64_t(spare + 1))) : 0;
        for (int l = 0; l < legs && int(parent.size()) < order - 1; ++l)
            parent.push_back(tail);
        if (int(parent.size()) < order) {
            spine.push_back(int(parent.size()));
            parent.push_back(tail);
        }
    }
    return RootedTree(std::move(parent), 0);
}

} // namespace

TreeFamily generate_family(const std::string& descriptor, std::uint64_t seed)
{
    const Descriptor d = parse_descriptor(descriptor);
    TreeFamily fam;

    if (d.kind == "random") {
        fam.n = int(d.integer("n"));
        fam.delta = int(d.integer("delta"));
        if (fam.n < 1 || fam.delta < 1)
            throw InputError("random generator needs n >= 1 and delta >= 1");
        const int lo = int(d.integer("min", fam.n / 2 + 1));
        const int hi = int(d.integer("max", fam.n));
        fill_family(fam, d, lo, hi, seed, [&](int order, std::uint64_t i) {
            return random_bounded_degree_tree(order, fam.delta, derive_seed(seed, {1, i}));
        });
    } else if (d.kind == "paths") {
        fam.n = int(d.integer("n"));
        fam.delta = 2;
        if (fam.n < 1)
            throw InputError("paths generator needs n >= 1");
        const int order = int(d.integer("order", fam.n));
        fill_family(fam, d, order, order, seed, [](int o, std::uint64_t) { return RootedTree::path(o); });
    } else if (d.kind == "caterpillars") {
        fam.n = int(d.integer("n"));
        fam.delta = int(d.integer("delta"));
        if (fam.n < 1)
            throw InputError("caterpillars generator needs n >= 1");
        const int order = int(d.integer("order", fam.n));
        fill_family(fam, d, order, order, seed, [&](int o, std::uint64_t i) {
            Engine rng = make_engine(derive_seed(seed, {2, i}));
            return caterpillar(o, fam.delta, rng);
        });
    } else if (d.kind == "regular") {
        const int delta = int(d.integer("delta"));
        const int depth = int(d.integer("depth"));
        const RootedTree t = regular_tree(delta, depth);
        fam.delta = delta;
        fam.n = int(d.integer("n", t.order()));
        if (t.order() > fam.n)
            throw InputError("regular tree of order " + std::to_string(t.order()) + " exceeds n = " +
                             std::to_string(fam.n));
        const long long copies = d.integer("copies", 1);
        if (copies < 0)
            throw InputError("copies must be >= 0");
        fam.trees.assign(std::size_t(copies), t);
    } else if (d.kind == "ringel") {
        const int k = int(d.integer("n"));
        if (k < 1)
            throw InputError("ringel generator needs n >= 1");
        const std::string shape = d.text("shape", "path");
        RootedTree t;
        if (shape == "path") {
            t = RootedTree::path(k + 1);
            fam.delta = k + 1 > 2 ? 2 : 1;
        } else if (shape == "random") {
            fam.delta = int(d.integer("delta"));
            t = random_bounded_degree_tree(k + 1, fam.delta, derive_seed(seed, {3}));
        } else {
            throw InputError("ringel shape must be path or random");
        }
        fam.n = 2 * k + 1;
        fam.trees.assign(std::size_t(2 * k + 1), t);
    } else {
        throw InputError("unknown generator kind '" + d.kind + "'");
    }

    std::int64_t cap = std::int64_t(fam.n) * (fam.n - 1) / 2;
    if (fam.total_edges() > cap)
        throw InputError("generated family exceeds C(n,2) edges");
    check_family_bounds(fam);
    return fam;
}

} // namespace treepack
