#pragma once

// Exhaustive reference computations used by unit and acceptance tests.

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "lfl/core.hpp"
#include "lfl/io.hpp"
#include "lfl/reduce.hpp"
#include "lfl/types.hpp"
#include "support.hpp"

namespace lfl::testing {

// Node-edge form of a fixture; radius problems go through the reduction pipeline.
inline NodeEdgeLFL node_edge_of(const Problem& p) {
  if (p.formalism == Formalism::NodeEdge) return p.node_edge;
  return run_pipeline(p.radius).node_edge.problem;
}

// Enumerates every far/adjacent label choice for every incoming element.
inline bool oracle_vt_feasible(const VirtualTree& vt, const NodeEdgeLFL& p, const std::vector<int>& poles) {
  const int m = static_cast<int>(vt.incoming.size());
  const int k = p.nout();
  return for_each_word(2 * m, k, [&](const std::vector<int>& w) {
    PairCounts counts;
    if (vt.poles >= 1) counts[p.pair(vt.x, poles[0])]++;
    if (vt.poles >= 2) counts[p.pair(vt.x_right, poles[1])]++;
    for (int i = 0; i < m; ++i) {
      const auto& in = vt.incoming[i];
      int a = w[2 * i], b = w[2 * i + 1];
      if (!in.type.test(a)) return false;
      if (!p.edge_ok(p.pair(in.x_far, a), p.pair(in.x_adj, b))) return false;
      counts[p.pair(in.x_adj, b)]++;
    }
    for (const auto& c : p.node_configs)
      if (match_node_config(counts, c)) return true;
    return false;
  });
}

inline Bits oracle_vt_type(const VirtualTree& vt, const NodeEdgeLFL& p) {
  const int k = p.nout();
  if (vt.poles == 0) {
    Bits b(1);
    if (oracle_vt_feasible(vt, p, {})) b.set(0);
    return b;
  }
  if (vt.poles == 1) {
    Bits t(k);
    for (int y = 0; y < k; ++y)
      if (oracle_vt_feasible(vt, p, {y})) t.set(y);
    return t;
  }
  Bits t(k * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (oracle_vt_feasible(vt, p, {a, b})) t.set(a * k + b);
  return t;
}

// Same feasibility as oracle_vt_feasible, as a dynamic program over incoming elements with
// pair counts capped one above the largest configuration count. Polynomial in the tree size.
inline bool oracle_vt_feasible_dp(const VirtualTree& vt, const NodeEdgeLFL& p, const std::vector<int>& poles) {
  int cap = 0;
  for (const auto& c : p.node_configs)
    for (const auto& e : c) cap = std::max(cap, e.count);
  ++cap;
  std::vector<int> start(p.npairs(), 0);
  auto bump = [&](std::vector<int>& v, int q) { v[q] = std::min(cap, v[q] + 1); };
  if (vt.poles >= 1) bump(start, p.pair(vt.x, poles[0]));
  if (vt.poles >= 2) bump(start, p.pair(vt.x_right, poles[1]));
  std::set<std::vector<int>> cur{start};
  for (const auto& in : vt.incoming) {
    std::set<int> adj_pairs;
    for (int a = 0; a < p.nout(); ++a) {
      if (!in.type.test(a)) continue;
      for (int b = 0; b < p.nout(); ++b)
        if (p.edge_ok(p.pair(in.x_far, a), p.pair(in.x_adj, b))) adj_pairs.insert(p.pair(in.x_adj, b));
    }
    std::set<std::vector<int>> next;
    for (const auto& s : cur)
      for (int q : adj_pairs) {
        auto t = s;
        bump(t, q);
        next.insert(std::move(t));
      }
    cur = std::move(next);
  }
  for (const auto& s : cur) {
    PairCounts counts;
    for (int q = 0; q < p.npairs(); ++q)
      if (s[q] > 0) counts[q] = s[q];
    for (const auto& c : p.node_configs)
      if (match_node_config(counts, c)) return true;
  }
  return false;
}

inline Bits oracle_vt_type_dp(const VirtualTree& vt, const NodeEdgeLFL& p) {
  const int k = p.nout();
  if (vt.poles == 0) {
    Bits b(1);
    if (oracle_vt_feasible_dp(vt, p, {})) b.set(0);
    return b;
  }
  if (vt.poles == 1) {
    Bits t(k);
    for (int y = 0; y < k; ++y)
      if (oracle_vt_feasible_dp(vt, p, {y})) t.set(y);
    return t;
  }
  Bits t(k * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (oracle_vt_feasible_dp(vt, p, {a, b})) t.set(a * k + b);
  return t;
}

// Labels every half-edge of the component of `root` (boundary edges cut) and collects
// the boundary labels of valid internal labelings.
inline Bits oracle_subtree_type(const TreeInstance& t, int root, const std::vector<int>& boundary,
                                const NodeEdgeLFL& p) {
  std::vector<char> cut(t.m(), 0), in(t.n(), 0);
  for (int h : boundary) cut[h / 2] = 1;
  std::vector<int> nodes{root}, edges;
  in[root] = 1;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (auto [w, e] : t.adj[nodes[i]]) {
      if (cut[e] || in[w]) continue;
      in[w] = 1;
      nodes.push_back(w);
      edges.push_back(e);
    }
  std::vector<int> halves;
  for (int e : edges) {
    halves.push_back(2 * e);
    halves.push_back(2 * e + 1);
  }
  halves.insert(halves.end(), boundary.begin(), boundary.end());
  const int k = p.nout();
  Bits type(boundary.size() == 2 ? k * k : boundary.empty() ? 1 : k);
  Labeling sigma(2 * t.m(), 0);
  for_each_word(static_cast<int>(halves.size()), k, [&](const std::vector<int>& w) {
    for (std::size_t i = 0; i < halves.size(); ++i) sigma[halves[i]] = w[i];
    for (int e : edges)
      if (!p.edge_ok(p.pair(t.half_inputs[2 * e], sigma[2 * e]), p.pair(t.half_inputs[2 * e + 1], sigma[2 * e + 1])))
        return false;
    for (int v : nodes) {
      PairCounts counts;
      for (auto [w2, e] : t.adj[v]) {
        (void)w2;
        int h = t.half_at(e, v);
        counts[p.pair(t.half_inputs[h], sigma[h])]++;
      }
      if (!std::any_of(p.node_configs.begin(), p.node_configs.end(),
                       [&](const NodeConfig& c) { return match_node_config(counts, c); }))
        return false;
    }
    if (boundary.empty())
      type.set(0);
    else if (boundary.size() == 1)
      type.set(sigma[boundary[0]]);
    else
      type.set(sigma[boundary[0]] * k + sigma[boundary[1]]);
    return false;
  });
  return type;
}

// Path type straight from the definition: choose a label pair per node, check path edges.
inline Bits oracle_path_type(const std::vector<NodeBehavior>& path, const NodeEdgeLFL& p) {
  const int k = p.nout();
  const int L = static_cast<int>(path.size());
  Bits out(k * k);
  for_each_word(L, k * k, [&](const std::vector<int>& w) {
    for (int i = 0; i < L; ++i)
      if (!path[i].type.test(w[i])) return false;
    for (int i = 0; i + 1 < L; ++i)
      if (!p.edge_ok(p.pair(path[i].x_right, w[i] % k), p.pair(path[i + 1].x_left, w[i + 1] / k))) return false;
    out.set((w[0] / k) * k + w[L - 1] % k);
    return false;
  });
  return out;
}

// Path type by a forward reachability sweep per leftmost label; linear in the path length.
inline Bits oracle_path_type_dp(const std::vector<NodeBehavior>& path, const NodeEdgeLFL& p) {
  const int k = p.nout();
  Bits out(k * k);
  for (int first = 0; first < k; ++first) {
    std::vector<char> right(k, 0);  // right labels reachable at the current node
    for (int r = 0; r < k; ++r) right[r] = path[0].type.test(first * k + r);
    for (std::size_t i = 1; i < path.size(); ++i) {
      std::vector<char> next(k, 0);
      for (int l = 0; l < k; ++l) {
        bool in = false;
        for (int r = 0; r < k && !in; ++r)
          in = right[r] && p.edge_ok(p.pair(path[i - 1].x_right, r), p.pair(path[i].x_left, l));
        if (!in) continue;
        for (int r = 0; r < k; ++r)
          if (path[i].type.test(l * k + r)) next[r] = 1;
      }
      right = std::move(next);
    }
    for (int r = 0; r < k; ++r)
      if (right[r]) out.set(first * k + r);
  }
  return out;
}

// Every (rooted cut) boundary: for each edge e and side s, the subtree behind half 2e+s.
template <class F>
void for_each_rooted_cut(const TreeInstance& t, F&& f) {
  for (int h = 0; h < 2 * t.m(); ++h) f(t.half_node(h), h);
}

inline TreeInstance with_uniform_halves(TreeInstance t) {
  t.node_inputs.assign(t.n(), 0);
  t.fill_half_from_nodes();
  return t;
}

}  // namespace lfl::testing
