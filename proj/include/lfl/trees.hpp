#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lfl/core.hpp"

namespace lfl {

using Rng = std::mt19937_64;

TreeInstance path_tree(int n);
TreeInstance star_tree(int leaves);
TreeInstance caterpillar_tree(int spine, int legs_per_node);
TreeInstance broom_tree(int handle, int bristles);
// Uniform labeled tree via Pruefer sequence decoding.
TreeInstance random_tree(int n, Rng& rng);

// AHU encoding of the subtree below `root` (not crossing `parent`), truncated at `depth`
// (-1 = unlimited). `labels` (optional) is appended per node.
std::string rooted_canonical(const TreeInstance& t, int root, int parent = -1, int depth = -1,
                             const std::vector<int>* labels = nullptr);
std::string unrooted_canonical(const TreeInstance& t);

// All pairwise non-isomorphic trees with exactly n nodes, in a deterministic order.
std::vector<TreeInstance> nonisomorphic_trees(int n);
std::vector<TreeInstance> nonisomorphic_trees_up_to(int n);

// Sets node inputs (and the duplicated half-edge inputs).
void set_node_inputs(TreeInstance& t, const std::vector<int>& inputs);
void set_uniform_inputs(TreeInstance& t, int input = 0);

}  // namespace lfl
