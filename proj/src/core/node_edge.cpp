#include <algorithm>
#include <numeric>

#include "lfl/core.hpp"

namespace lfl {

Alphabet::Alphabet(std::vector<std::string> symbols) {
  for (auto& s : symbols) {
    if (index_.count(s)) throw MalformedInput("duplicate symbol '" + s + "'");
    add(std::move(s));
  }
}

int Alphabet::index(std::string_view s) const {
  auto f = find(s);
  if (!f) throw MalformedInput("unknown symbol '" + std::string(s) + "'");
  return *f;
}

std::optional<int> Alphabet::find(std::string_view s) const {
  auto it = index_.find(std::string(s));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Alphabet::add(std::string s) {
  auto it = index_.find(s);
  if (it != index_.end()) return it->second;
  int id = size();
  index_.emplace(s, id);
  symbols_.push_back(std::move(s));
  return id;
}

NodeConfig canonical_node_config(std::vector<NodeConfigEntry> entries) {
  std::sort(entries.begin(), entries.end());
  NodeConfig out;
  for (const auto& e : entries) {
    if (!out.empty() && out.back().pair == e.pair) {
      out.back().count += e.count;
      out.back().star = out.back().star || e.star;
    } else {
      out.push_back(e);
    }
  }
  return out;
}

void NodeEdgeLFL::finalize() {
  if (nout() == 0) throw MalformedInput("sigma_out must be non-empty");
  if (nin() == 0) throw MalformedInput("sigma_in must be non-empty");
  for (auto& c : node_configs) {
    for (const auto& e : c)
      if (e.pair < 0 || e.pair >= npairs() || e.count < 0)
        throw MalformedInput("node configuration references an unknown pair");
    c = canonical_node_config(c);
  }
  std::sort(node_configs.begin(), node_configs.end());
  node_configs.erase(std::unique(node_configs.begin(), node_configs.end()), node_configs.end());
  for (auto& [p, q] : edge_configs) {
    if (p < 0 || q < 0 || p >= npairs() || q >= npairs())
      throw MalformedInput("edge configuration references an unknown pair");
    if (p > q) std::swap(p, q);
  }
  std::sort(edge_configs.begin(), edge_configs.end());
  edge_configs.erase(std::unique(edge_configs.begin(), edge_configs.end()), edge_configs.end());
  edge_matrix_.assign(static_cast<std::size_t>(npairs()) * npairs(), 0);
  for (auto [p, q] : edge_configs) {
    edge_matrix_[static_cast<std::size_t>(p) * npairs() + q] = 1;
    edge_matrix_[static_cast<std::size_t>(q) * npairs() + p] = 1;
  }
  max_config_size_ = 0;
  for (const auto& c : node_configs) {
    int s = 0;
    for (const auto& e : c) s += e.count + (e.star ? 1 : 0);
    max_config_size_ = std::max(max_config_size_, s);
  }
}

std::string NodeEdgeLFL::pair_name(int p) const {
  if (nin() == 1) return sigma_out.name(pair_out(p));
  return "(" + sigma_in.name(pair_in(p)) + "," + sigma_out.name(pair_out(p)) + ")";
}

bool match_node_config(const PairCounts& labels, const NodeConfig& config) {
  auto it = labels.begin();
  for (const auto& e : config) {
    while (it != labels.end() && it->first < e.pair) {
      if (it->second > 0) return false;
      ++it;
    }
    int m = (it != labels.end() && it->first == e.pair) ? it->second : 0;
    if (m != e.count && !(m > e.count && e.star)) return false;
    if (it != labels.end() && it->first == e.pair) ++it;
  }
  for (; it != labels.end(); ++it)
    if (it->second > 0) return false;
  return true;
}

bool match_edge_config(int p, int q, const NodeEdgeLFL& problem) { return problem.edge_ok(p, q); }

TreeInstance TreeInstance::from_edges(int n, const std::vector<std::array<int, 2>>& edges) {
  TreeInstance t;
  t.ids.resize(n);
  for (int i = 0; i < n; ++i) t.ids[i] = std::to_string(i);
  t.edges = edges;
  t.adj.assign(n, {});
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    auto [u, v] = edges[e];
    if (u < 0 || v < 0 || u >= n || v >= n) throw MalformedInput("edge endpoint out of range");
    t.adj[u].push_back({v, e});
    t.adj[v].push_back({u, e});
  }
  return t;
}

void TreeInstance::check_tree() const {
  if (n() == 0) throw MalformedInput("instance has no nodes");
  if (m() != n() - 1) throw MalformedInput("instance is not a tree: edge count != n-1");
  std::vector<int> parent(n());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [u, v] : edges) {
    if (u == v) throw MalformedInput("instance contains a self-loop");
    int a = find(u), b = find(v);
    if (a == b) throw MalformedInput("instance contains a cycle");
    parent[a] = b;
  }
}

void TreeInstance::fill_half_from_nodes() {
  if (static_cast<int>(node_inputs.size()) != n()) throw MalformedInput("node inputs missing");
  half_inputs.assign(2 * m(), 0);
  for (int e = 0; e < m(); ++e) {
    half_inputs[2 * e] = node_inputs[edges[e][0]];
    half_inputs[2 * e + 1] = node_inputs[edges[e][1]];
  }
}

PairCounts node_pairs(const TreeInstance& inst, const Labeling& sigma, int v, const NodeEdgeLFL& problem) {
  PairCounts counts;
  for (auto [u, e] : inst.adj[v]) {
    int h = inst.half_at(e, v);
    counts[problem.pair(inst.half_inputs[h], sigma[h])]++;
  }
  return counts;
}

Verdict verify_node_edge(const TreeInstance& inst, const Labeling& sigma, const NodeEdgeLFL& problem) {
  if (static_cast<int>(sigma.size()) != 2 * inst.m()) throw MalformedInput("labeling is not total over half-edges");
  if (static_cast<int>(inst.half_inputs.size()) != 2 * inst.m()) throw MalformedInput("half-edge inputs missing");
  for (int h = 0; h < 2 * inst.m(); ++h) {
    if (sigma[h] < 0 || sigma[h] >= problem.nout()) throw MalformedInput("labeling uses an unknown output");
    if (inst.half_inputs[h] < 0 || inst.half_inputs[h] >= problem.nin()) throw MalformedInput("unknown input");
  }
  Verdict verdict;
  for (int v = 0; v < inst.n(); ++v) {
    PairCounts counts = node_pairs(inst, sigma, v, problem);
    bool ok = std::any_of(problem.node_configs.begin(), problem.node_configs.end(),
                          [&](const NodeConfig& c) { return match_node_config(counts, c); });
    if (!ok) verdict.violations.push_back({Violation::Kind::Node, v, "node multiset matches no node configuration"});
  }
  for (int e = 0; e < inst.m(); ++e) {
    int p = problem.pair(inst.half_inputs[2 * e], sigma[2 * e]);
    int q = problem.pair(inst.half_inputs[2 * e + 1], sigma[2 * e + 1]);
    if (!problem.edge_ok(p, q))
      verdict.violations.push_back({Violation::Kind::Edge, e, "edge pair not in edge configurations"});
  }
  verdict.valid = verdict.violations.empty();
  return verdict;
}

}  // namespace lfl
