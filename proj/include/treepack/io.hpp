#pragma once

#include "treepack/tree.hpp"

#include <iosfwd>

namespace treepack {

/// Line-oriented tree families. First line {"n":..,"delta":..}, then one tree
/// per line as {"order":..,"root":..,"parent":[..]} with parent[root] = -1.
void write_family_jsonl(std::ostream& out, const TreeFamily& fam);

/// Throws InputError naming the offending line.
TreeFamily read_family_jsonl(std::istream& in);

} // namespace treepack
