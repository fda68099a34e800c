#include "treepack/error.hpp"
#include "treepack/tree.hpp"

#include <algorithm>
#include <sstream>

namespace treepack {

namespace {

/// Splits t into connected pieces of size <= xi v(T) by repeated heavy-child
/// descent from the root; returns piece roots in the order they were cut.
std::vector<int> cut_components(const RootedTree& t, double xi, std::vector<int>& piece_of)
{
    const int k = t.order();
    std::vector<std::vector<int>> children(static_cast<std::size_t>(k));
    for (int v = 0; v < k; ++v)
        if (v != t.root())
            children[std::size_t(t.parent(v))].push_back(v);

    std::vector<int> size(std::size_t(k), 1);
    const auto pre = t.preorder();
    for (auto it = pre.rbegin(); it != pre.rend(); ++it)
        if (*it != t.root())
            size[std::size_t(t.parent(*it))] += size[std::size_t(*it)];

    std::vector<char> alive(std::size_t(k), 1);
    piece_of.assign(std::size_t(k), -1);
    const double limit = xi * double(k);
    std::vector<int> piece_roots;
    std::vector<int> stack;

    auto cut = [&](int y) {
        const int id = int(piece_roots.size());
        piece_roots.push_back(y);
        const int removed = size[std::size_t(y)];
        stack.assign(1, y);
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            alive[std::size_t(v)] = 0;
            piece_of[std::size_t(v)] = id;
            for (int c : children[std::size_t(v)])
                if (alive[std::size_t(c)])
                    stack.push_back(c);
        }
        for (int a = t.parent(y); a >= 0; a = t.parent(a))
            size[std::size_t(a)] -= removed;
    };

    while (alive[std::size_t(t.root())]) {
        int y = t.root();
        if (double(size[std::size_t(y)]) <= limit) {
            cut(y);
            break;
        }
        for (;;) {
            int best = -1;
            for (int c : children[std::size_t(y)])
                if (alive[std::size_t(c)] && (best < 0 || size[std::size_t(c)] > size[std::size_t(best)]))
                    best = c;
            if (best < 0) {
                // Only reachable when xi v(T) < 1: a single vertex is the smallest piece.
                cut(y);
                break;
            }
            if (double(size[std::size_t(best)]) <= limit) {
                cut(best);
                break;
            }
            y = best;
        }
    }
    return piece_roots;
}

LevelPartition assemble_levels(const RootedTree& t, int r, double rho)
{
    const int k = t.order();
    const double xi = rho / (2.0 * r);
    std::vector<int> piece_of;
    const std::vector<int> piece_roots = cut_components(t, xi, piece_of);
    const int pieces = int(piece_roots.size());

    // A piece lying above another has its root earlier in preorder, so
    // prefixes in this order are closed upwards.
    std::vector<int> pre_pos(static_cast<std::size_t>(k));
    const auto pre = t.preorder();
    for (int i = 0; i < k; ++i)
        pre_pos[std::size_t(pre[std::size_t(i)])] = i;
    std::vector<int> order(static_cast<std::size_t>(pieces));
    for (int i = 0; i < pieces; ++i)
        order[std::size_t(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return pre_pos[std::size_t(piece_roots[std::size_t(a)])] < pre_pos[std::size_t(piece_roots[std::size_t(b)])];
    });
    std::vector<int> piece_size(std::size_t(pieces), 0);
    for (int v = 0; v < k; ++v)
        ++piece_size[std::size_t(piece_of[std::size_t(v)])];

    // Level i closes once the running total reaches i v/r - xi v/2; with pieces
    // of size <= xi v this keeps every level within v/r +- xi v.
    std::vector<int> level_of_piece(std::size_t(pieces), r - 1);
    int level = 0;
    std::int64_t total = 0;
    for (int idx : order) {
        level_of_piece[std::size_t(idx)] = level;
        total += piece_size[std::size_t(idx)];
        if (level < r - 1 && double(total) >= double(level + 1) * k / r - xi * k / 2.0)
            ++level;
    }

    LevelPartition out;
    out.r = r;
    out.rho = rho;
    out.cut_components = pieces;
    out.levels.assign(std::size_t(r), {});
    out.level_roots.assign(std::size_t(r), {});
    out.level_of.assign(std::size_t(k), 0);
    for (int v = 0; v < k; ++v) {
        const int j = level_of_piece[std::size_t(piece_of[std::size_t(v)])];
        out.level_of[std::size_t(v)] = j;
        out.levels[std::size_t(j)].push_back(v);
    }
    for (int v = 0; v < k; ++v) {
        const int j = out.level_of[std::size_t(v)];
        const int p = t.parent(v);
        if (p < 0 || out.level_of[std::size_t(p)] != j)
            out.level_roots[std::size_t(j)].push_back(v);
    }
    return out;
}

} // namespace

LevelPartition balanced_level_partition(const RootedTree& t, int r, double rho, int delta)
{
    if (r < 1)
        throw InputError("r must be >= 1");
    if (!(rho > 0.0 && rho * 4.0 * r < 1.0)) {
        std::ostringstream msg;
        msg << "cutting hypothesis 0 < rho < 1/(4r) fails: rho = " << rho << ", 1/(4r) = " << 1.0 / (4.0 * r);
        throw InputError(msg.str());
    }
    if (t.max_degree() > delta)
        throw InputError("tree max degree exceeds delta");
    const double need = 4.0 * delta * r / rho;
    if (double(t.order()) < need) {
        std::ostringstream msg;
        msg << "cutting hypothesis v(T) >= 4 delta r / rho fails: v(T) = " << t.order() << " < " << need;
        throw InputError(msg.str());
    }
    return assemble_levels(t, r, rho);
}

LevelPartition balanced_level_partition(const RootedTree& t, int r, double rho)
{
    return balanced_level_partition(t, r, rho, std::max(1, t.max_degree()));
}

LevelPartition cut_into_levels(const RootedTree& t, int r, double rho)
{
    if (r < 1)
        throw InputError("r must be >= 1");
    if (!(rho > 0.0 && rho < 2.0))
        throw InputError("rho must lie in (0, 2)");
    return assemble_levels(t, r, rho);
}

int induced_component_count(const RootedTree& t, const std::vector<int>& vs)
{
    std::vector<char> in(std::size_t(t.order()), 0);
    for (int v : vs)
        in[std::size_t(v)] = 1;
    int count = 0;
    for (int v : vs) {
        const int p = t.parent(v);
        if (p < 0 || !in[std::size_t(p)])
            ++count;
    }
    return count;
}

} // namespace treepack
