#include "lfl/trees.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace lfl {

TreeInstance path_tree(int n) {
  std::vector<std::array<int, 2>> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return TreeInstance::from_edges(n, e);
}

TreeInstance star_tree(int leaves) {
  std::vector<std::array<int, 2>> e;
  for (int i = 1; i <= leaves; ++i) e.push_back({0, i});
  return TreeInstance::from_edges(leaves + 1, e);
}

TreeInstance caterpillar_tree(int spine, int legs_per_node) {
  std::vector<std::array<int, 2>> e;
  int n = spine;
  for (int i = 0; i + 1 < spine; ++i) e.push_back({i, i + 1});
  for (int i = 0; i < spine; ++i)
    for (int k = 0; k < legs_per_node; ++k) e.push_back({i, n++});
  return TreeInstance::from_edges(n, e);
}

TreeInstance broom_tree(int handle, int bristles) {
  std::vector<std::array<int, 2>> e;
  for (int i = 0; i + 1 < handle; ++i) e.push_back({i, i + 1});
  int n = handle;
  for (int k = 0; k < bristles; ++k) e.push_back({handle - 1, n++});
  return TreeInstance::from_edges(n, e);
}

TreeInstance random_tree(int n, Rng& rng) {
  if (n <= 1) return TreeInstance::from_edges(1, {});
  if (n == 2) return TreeInstance::from_edges(2, {{0, 1}});
  std::vector<int> seq(n - 2);
  std::uniform_int_distribution<int> d(0, n - 1);
  for (auto& s : seq) s = d(rng);
  std::vector<int> degree(n, 1);
  for (int s : seq) ++degree[s];
  std::priority_queue<int, std::vector<int>, std::greater<int>> leaves;
  for (int v = 0; v < n; ++v)
    if (degree[v] == 1) leaves.push(v);
  std::vector<std::array<int, 2>> e;
  for (int s : seq) {
    int leaf = leaves.top();
    leaves.pop();
    e.push_back({leaf, s});
    if (--degree[s] == 1) leaves.push(s);
  }
  int a = leaves.top();
  leaves.pop();
  int b = leaves.top();
  e.push_back({a, b});
  return TreeInstance::from_edges(n, e);
}

std::string rooted_canonical(const TreeInstance& t, int root, int parent, int depth, const std::vector<int>* labels) {
  std::vector<std::string> kids;
  if (depth != 0)
    for (auto [w, e] : t.adj[root])
      if (w != parent) kids.push_back(rooted_canonical(t, w, root, depth < 0 ? -1 : depth - 1, labels));
  std::sort(kids.begin(), kids.end());
  std::string s = "(";
  if (labels) s += std::to_string((*labels)[root]);
  for (const auto& k : kids) s += k;
  s += ")";
  return s;
}

namespace {

std::vector<int> tree_centers(const TreeInstance& t) {
  int n = t.n();
  if (n <= 2) {
    std::vector<int> c;
    for (int i = 0; i < n; ++i) c.push_back(i);
    return c;
  }
  std::vector<int> deg(n);
  std::vector<int> layer;
  for (int v = 0; v < n; ++v) {
    deg[v] = t.degree(v);
    if (deg[v] <= 1) layer.push_back(v);
  }
  int remaining = n;
  while (remaining > 2) {
    remaining -= static_cast<int>(layer.size());
    std::vector<int> next;
    for (int v : layer)
      for (auto [w, e] : t.adj[v])
        if (--deg[w] == 1) next.push_back(w);
    layer = next;
  }
  std::sort(layer.begin(), layer.end());
  return layer;
}

}  // namespace

std::string unrooted_canonical(const TreeInstance& t) {
  auto centers = tree_centers(t);
  std::string best;
  for (int c : centers) {
    std::string s = rooted_canonical(t, c);
    if (best.empty() || s < best) best = s;
  }
  return best;
}

std::vector<TreeInstance> nonisomorphic_trees(int n) {
  if (n <= 0) return {};
  std::vector<TreeInstance> level{TreeInstance::from_edges(1, {})};
  for (int size = 2; size <= n; ++size) {
    std::set<std::string> seen;
    std::vector<TreeInstance> next;
    for (const auto& t : level)
      for (int v = 0; v < t.n(); ++v) {
        auto edges = t.edges;
        edges.push_back({v, t.n()});
        TreeInstance u = TreeInstance::from_edges(t.n() + 1, edges);
        if (seen.insert(unrooted_canonical(u)).second) next.push_back(std::move(u));
      }
    level = std::move(next);
  }
  for (auto& t : level) set_uniform_inputs(t);
  return level;
}

std::vector<TreeInstance> nonisomorphic_trees_up_to(int n) {
  std::vector<TreeInstance> all;
  for (int k = 1; k <= n; ++k) {
    auto level = nonisomorphic_trees(k);
    all.insert(all.end(), level.begin(), level.end());
  }
  return all;
}

void set_node_inputs(TreeInstance& t, const std::vector<int>& inputs) {
  t.node_inputs = inputs;
  t.fill_half_from_nodes();
}

void set_uniform_inputs(TreeInstance& t, int input) { set_node_inputs(t, std::vector<int>(t.n(), input)); }

}  // namespace lfl
