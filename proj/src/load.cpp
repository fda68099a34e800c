#include "treepack/load.hpp"

#include "treepack/error.hpp"
#include "treepack/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace treepack {

namespace {

struct Membership {
    int words = 0;
    std::vector<Word> bits; ///< m rows of `words` words
    std::vector<int> count; ///< c(v)
};

Membership build_membership(int m, const SetFamily& family)
{
    if (m < 2)
        throw InputError("load statistics need m >= 2");
    Membership mb;
    const int k = int(family.size());
    mb.words = words_for(k);
    mb.bits.assign(std::size_t(m) * std::size_t(mb.words), 0);
    mb.count.assign(std::size_t(m), 0);
    for (int s = 0; s < k; ++s) {
        for (int v : family[std::size_t(s)]) {
            if (v < 0 || v >= m)
                throw InputError("set " + std::to_string(s) + " contains out-of-range vertex " + std::to_string(v));
            Word& w = mb.bits[std::size_t(v) * std::size_t(mb.words) + std::size_t(s / kWordBits)];
            const Word bit = Word(1) << (s % kWordBits);
            if (!(w & bit)) {
                w |= bit;
                ++mb.count[std::size_t(v)];
            }
        }
    }
    return mb;
}

template <class Visit>
void for_each_load(int m, const Membership& mb, Visit visit)
{
    for (int v = 0; v < m; ++v) {
        const Word* rv = mb.bits.data() + std::size_t(v) * std::size_t(mb.words);
        for (int w = v + 1; w < m; ++w) {
            const Word* rw = mb.bits.data() + std::size_t(w) * std::size_t(mb.words);
            int both = 0;
            for (int i = 0; i < mb.words; ++i)
                both += std::popcount(rv[i] & rw[i]);
            visit(v, w, std::int64_t(mb.count[std::size_t(v)]) + mb.count[std::size_t(w)] - both);
        }
    }
}

int size_gap(const SetFamily& family)
{
    if (family.empty())
        return 0;
    // Sizes of the sets as vertex sets (duplicates ignored).
    int lo = 0, hi = 0;
    bool first = true;
    std::vector<int> tmp;
    for (const auto& s : family) {
        tmp = s;
        std::sort(tmp.begin(), tmp.end());
        const int sz = int(std::unique(tmp.begin(), tmp.end()) - tmp.begin());
        lo = first ? sz : std::min(lo, sz);
        hi = first ? sz : std::max(hi, sz);
        first = false;
    }
    return hi - lo;
}

} // namespace

std::int64_t pair_index(int m, int v, int w)
{
    // Pairs (v, *) precede (v+1, *); row v holds m-1-v pairs.
    return std::int64_t(v) * (2 * std::int64_t(m) - v - 1) / 2 + (w - v - 1);
}

LoadStats load_stats(int m, const SetFamily& family)
{
    const Membership mb = build_membership(m, family);
    LoadStats st;
    for_each_load(m, mb, [&](int, int, std::int64_t load) {
        st.sum_load += load;
        st.sum_load_sq += load * load;
    });
    const std::int64_t pairs = std::int64_t(m) * (m - 1) / 2;
    st.mu = double(st.sum_load) / double(pairs);
    // sigma = S2 - S1^2 / P, formed exactly as (P S2 - S1^2) / P.
    const __int128 num = __int128(pairs) * st.sum_load_sq - __int128(st.sum_load) * st.sum_load;
    st.sigma = double(num) / double(pairs);
    st.max_size_gap = size_gap(family);
    return st;
}

TypicalityReport classify_typical(const SetFamily& family, double alpha, int m, int n)
{
    if (!(alpha > 0.0))
        throw InputError("typicality needs alpha > 0");
    const Membership mb = build_membership(m, family);
    const LoadStats st = load_stats(m, family);
    TypicalityReport rep;
    const double n2 = double(n) * double(n);
    rep.threshold = std::sqrt(alpha) * n2;
    rep.sqrt_alpha_bound = std::sqrt(alpha) * n2;
    rep.fourth_root_bound = std::pow(alpha, 0.25) * n2;
    rep.homogeneous_sigma = st.sigma <= alpha * n2 * n2;
    rep.typical.assign(std::size_t(std::int64_t(m) * (m - 1) / 2), 1);
    for_each_load(m, mb, [&](int v, int w, std::int64_t load) {
        const double dev = double(load) - st.mu;
        if (dev * dev > rep.threshold) {
            rep.typical[std::size_t(pair_index(m, v, w))] = 0;
            ++rep.atypical;
        }
    });
    return rep;
}

std::vector<int> important_groups(const std::vector<int>& group_sizes, double alpha, int n, int r)
{
    std::vector<int> out;
    const double bar = std::sqrt(alpha) * n * r / 2.0;
    for (int i = 0; i < int(group_sizes.size()); ++i)
        if (double(group_sizes[std::size_t(i)]) > bar)
            out.push_back(i);
    return out;
}

} // namespace treepack
