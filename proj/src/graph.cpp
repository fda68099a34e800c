#include "treepack/graph.hpp"

#include "treepack/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace treepack {

HostGraph::HostGraph(int order) : order_(order), words_(words_for(order))
{
    if (order < 0)
        throw InputError("graph order must be non-negative");
    bits_.assign(std::size_t(order) * std::size_t(words_), 0);
}

HostGraph HostGraph::complete(int order)
{
    HostGraph g(order);
    for (int v = 0; v < order; ++v) {
        Word* r = g.bits_.data() + std::size_t(v) * std::size_t(g.words_);
        for (int w = 0; w < g.words_; ++w) {
            const int lo = w * kWordBits;
            const int hi = std::min(order, lo + kWordBits);
            const int width = hi - lo;
            r[w] = width == kWordBits ? ~Word(0) : ((Word(1) << width) - 1);
        }
        r[v / kWordBits] &= ~(Word(1) << (v % kWordBits));
    }
    g.edge_count_ = std::int64_t(order) * (order - 1) / 2;
    return g;
}

HostGraph HostGraph::from_edges(int order, std::span<const VertexPair> edges)
{
    HostGraph g(order);
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= order || v >= order)
            throw InputError("edge endpoint out of range");
        if (u == v)
            throw InputError("self-loop " + std::to_string(u));
        g.add_edge(u, v);
    }
    return g;
}

double HostGraph::density() const
{
    if (order_ < 2)
        return 0.0;
    return double(edge_count_) / (double(order_) * double(order_ - 1) / 2.0);
}

int HostGraph::degree(int v) const
{
    int d = 0;
    for (Word w : row(v))
        d += std::popcount(w);
    return d;
}

void HostGraph::set_bit(int u, int v, bool value)
{
    Word& a = bits_[std::size_t(u) * std::size_t(words_) + std::size_t(v / kWordBits)];
    Word& b = bits_[std::size_t(v) * std::size_t(words_) + std::size_t(u / kWordBits)];
    const Word ma = Word(1) << (v % kWordBits);
    const Word mb = Word(1) << (u % kWordBits);
    if (value) {
        a |= ma;
        b |= mb;
    } else {
        a &= ~ma;
        b &= ~mb;
    }
}

bool HostGraph::add_edge(int u, int v)
{
    if (u == v)
        throw InputError("self-loop " + std::to_string(u));
    if (has_edge(u, v))
        return false;
    set_bit(u, v, true);
    ++edge_count_;
    return true;
}

std::vector<VertexPair> HostGraph::edges() const
{
    std::vector<VertexPair> out;
    out.reserve(std::size_t(edge_count_));
    for (int u = 0; u < order_; ++u) {
        auto r = row(u);
        for (int w = u / kWordBits; w < words_; ++w) {
            Word bits = r[std::size_t(w)];
            while (bits) {
                const int v = w * kWordBits + std::countr_zero(bits);
                bits &= bits - 1;
                if (v > u)
                    out.emplace_back(u, v);
            }
        }
    }
    return out;
}

InducedSubgraph induced_subgraph(const HostGraph& g, std::span<const int> vertices)
{
    std::vector<int> keep(vertices.begin(), vertices.end());
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
        throw InputError("induced_subgraph: repeated vertex");
    if (!keep.empty() && (keep.front() < 0 || keep.back() >= g.order()))
        throw InputError("induced_subgraph: vertex out of range");

    const int k = int(keep.size());
    HostGraph sub(k);
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            if (g.has_edge(keep[std::size_t(a)], keep[std::size_t(b)]))
                sub.add_edge(a, b);
    return {std::move(sub), std::move(keep)};
}

namespace {

void check_tuple(const HostGraph& g, std::span<const int> vs)
{
    if (vs.empty())
        throw InputError("vertex tuple must be non-empty");
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (vs[i] < 0 || vs[i] >= g.order())
            throw InputError("vertex " + std::to_string(vs[i]) + " out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (vs[i] == vs[j])
                throw InputError("duplicate vertex " + std::to_string(vs[i]));
    }
}

void and_rows(const HostGraph& g, std::span<const int> vs, std::vector<Word>& acc)
{
    auto first = g.row(vs[0]);
    acc.assign(first.begin(), first.end());
    for (std::size_t i = 1; i < vs.size(); ++i) {
        auto r = g.row(vs[i]);
        for (std::size_t w = 0; w < acc.size(); ++w)
            acc[w] &= r[w];
    }
}

} // namespace

int codegree(const HostGraph& g, std::span<const int> vs)
{
    check_tuple(g, vs);
    std::vector<Word> acc;
    and_rows(g, vs, acc);
    int c = 0;
    for (Word w : acc)
        c += std::popcount(w);
    return c;
}

std::vector<int> common_neighbourhood(const HostGraph& g, std::span<const int> vs)
{
    check_tuple(g, vs);
    std::vector<Word> acc;
    and_rows(g, vs, acc);
    std::vector<int> out;
    for (std::size_t w = 0; w < acc.size(); ++w) {
        Word bits = acc[w];
        while (bits) {
            out.push_back(int(w) * kWordBits + std::countr_zero(bits));
            bits &= bits - 1;
        }
    }
    return out;
}

bool outside_band(std::int64_t codeg, double density, double gamma, int p, int order)
{
    const double expected = std::pow(density, p) * double(order);
    const double lo = (1.0 - gamma) * expected;
    const double hi = (1.0 + gamma) * expected;
    const double c = double(codeg);
    return c < lo || c > hi;
}

bool is_gamma_bad(const HostGraph& g, double density, double gamma, std::span<const int> vs)
{
    const int c = codegree(g, vs);
    return outside_band(c, density, gamma, int(vs.size()), g.order());
}

HostGraph& remove_edges(HostGraph& g, std::span<const VertexPair> edges)
{
    std::vector<VertexPair> pairs;
    pairs.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= g.order() || v >= g.order() || u == v)
            throw InputError("remove_edges: invalid pair {" + std::to_string(u) + "," +
                             std::to_string(v) + "}");
        pairs.push_back(ordered_pair(u, v));
    }
    // Validate everything before mutating.
    std::vector<VertexPair> sorted = pairs;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1])
            throw DoubleUseError(sorted[i].first, sorted[i].second);
    }
    for (auto [u, v] : pairs)
        if (!g.has_edge(u, v))
            throw DoubleUseError(u, v);
    for (auto [u, v] : pairs)
        g.set_bit(u, v, false);
    g.edge_count_ -= std::int64_t(pairs.size());
    return g;
}

std::vector<Word> subset_mask(const HostGraph& g, std::span<const int> vertices)
{
    std::vector<Word> mask(std::size_t(g.row_words()), 0);
    for (int v : vertices) {
        if (v < 0 || v >= g.order())
            throw InputError("subset vertex out of range");
        mask[std::size_t(v / kWordBits)] |= Word(1) << (v % kWordBits);
    }
    return mask;
}

std::int64_t edges_between(const HostGraph& g, std::span<const Word> a, std::span<const Word> b)
{
    std::int64_t total = 0;
    for (std::size_t w = 0; w < a.size(); ++w) {
        Word bits = a[w];
        while (bits) {
            const int v = int(w) * kWordBits + std::countr_zero(bits);
            bits &= bits - 1;
            auto r = g.row(v);
            for (std::size_t x = 0; x < b.size(); ++x)
                total += std::popcount(r[x] & b[x]);
        }
    }
    return total;
}

std::int64_t edges_within(const HostGraph& g, std::span<const Word> mask)
{
    return edges_between(g, mask, mask) / 2;
}

void write_edge_list(std::ostream& out, const HostGraph& g)
{
    out << "m=" << g.order() << '\n';
    for (auto [u, v] : g.edges())
        out << u << ' ' << v << '\n';
}

HostGraph read_edge_list(std::istream& in)
{
    std::string line;
    int order = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (line.rfind("m=", 0) != 0)
            throw InputError("edge list: expected header 'm=<count>'");
        try {
            std::size_t used = 0;
            order = std::stoi(line.substr(2), &used);
            if (used != line.size() - 2)
                throw InputError("edge list: malformed header");
        } catch (const std::logic_error&) {
            throw InputError("edge list: malformed header '" + line + "'");
        }
        break;
    }
    if (order < 0)
        throw InputError("edge list: missing header");
    HostGraph g(order);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        int u = -1;
        int v = -1;
        std::string rest;
        if (!(ls >> u >> v) || (ls >> rest))
            throw InputError("edge list line " + std::to_string(lineno) + ": expected 'u v'");
        if (u < 0 || v < 0 || u >= order || v >= order || u == v)
            throw InputError("edge list line " + std::to_string(lineno) + ": invalid pair");
        g.add_edge(u, v);
    }
    return g;
}

} // namespace treepack
