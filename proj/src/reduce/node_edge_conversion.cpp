#include <algorithm>
#include <map>
#include <set>

#include "lfl/assign.hpp"
#include "lfl/reduce.hpp"

namespace lfl {

namespace {

struct Star {
  int center = 0;                              // radius label
  std::vector<std::pair<int, bool>> neighbors;  // (radius label, required)
};

Star star_of(const RadiusLFL& p, int ci) {
  const auto& c = p.configs[ci];
  Star s;
  s.center = c.in[c.center] * p.nout() + c.out[c.center];
  for (const auto& e : c.edges) {
    if (e.u == e.v) continue;
    int u = e.u == c.center ? e.v : e.u;
    s.neighbors.push_back({c.in[u] * p.nout() + c.out[u], e.required});
  }
  return s;
}

void check_radius1(const RadiusLFL& p) {
  if (p.radius != 1) throw PreconditionError("expected a radius-1 problem");
  if (!p.trivial_order()) throw PreconditionError("expected a problem without auxiliary labels");
}

std::string radius_label_name(const RadiusLFL& p, int l) {
  std::string out = p.sigma_out.name(l % p.nout());
  return p.nin() == 1 ? out : p.sigma_in.name(l / p.nout()) + "." + out;
}

}  // namespace

NodeEdgeConversion to_node_edge(const RadiusLFL& problem) {
  check_radius1(problem);
  NodeEdgeConversion conv;
  NodeEdgeLFL& ne = conv.problem;
  ne.sigma_in = problem.sigma_in;
  std::map<std::array<int, 2>, int> index;
  auto label = [&](int a, int b) {
    auto it = index.find({a, b});
    if (it != index.end()) return it->second;
    int id = ne.sigma_out.add(radius_label_name(problem, a) + ">" + radius_label_name(problem, b));
    index[{a, b}] = id;
    conv.label_parts.push_back({a, b});
    return id;
  };
  std::vector<Star> stars;
  std::vector<int> sources;
  for (int ci = 0; ci < static_cast<int>(problem.configs.size()); ++ci) {
    if (!problem.prepared(ci).matchable) continue;
    stars.push_back(star_of(problem, ci));
    sources.push_back(ci);
    for (auto [b, req] : stars.back().neighbors) label(stars.back().center, b);
  }
  const bool escape = problem.nin() > 1;
  if (escape) conv.escape_label = ne.sigma_out.add("~");
  const int nout2 = ne.sigma_out.size();
  auto pair_of = [&](int in, int out) { return in * nout2 + out; };

  conv.isolated_center.assign(problem.nin(), -1);
  std::set<NodeConfig> seen;
  for (std::size_t i = 0; i < stars.size(); ++i) {
    const Star& s = stars[i];
    int x = s.center / problem.nout();
    std::vector<NodeConfigEntry> entries;
    bool any_required = false;
    for (auto [b, req] : s.neighbors) {
      entries.push_back({pair_of(x, index.at({s.center, b})), req ? 1 : 0, !req});
      any_required |= req;
    }
    if (!any_required && conv.isolated_center[x] < 0) conv.isolated_center[x] = s.center % problem.nout();
    NodeConfig cfg = canonical_node_config(entries);
    if (!seen.insert(cfg).second) continue;
    ne.node_configs.push_back(std::move(cfg));
    conv.config_source.push_back(sources[i]);
  }
  for (std::size_t l = 0; l < conv.label_parts.size(); ++l) {
    auto [a, b] = conv.label_parts[l];
    auto it = index.find({b, a});
    if (it == index.end()) continue;
    int p = pair_of(a / problem.nout(), static_cast<int>(l));
    int q = pair_of(b / problem.nout(), it->second);
    ne.edge_configs.push_back({std::min(p, q), std::max(p, q)});
  }
  if (escape) {
    const int esc = conv.escape_label;
    for (int x1 = 0; x1 < problem.nin(); ++x1)
      for (int x2 = x1 + 1; x2 < problem.nin(); ++x2) {
        std::vector<NodeConfigEntry> entries;
        for (int x = 0; x < problem.nin(); ++x) entries.push_back({pair_of(x, esc), (x == x1 || x == x2) ? 1 : 0, true});
        ne.node_configs.push_back(canonical_node_config(entries));
        conv.config_source.push_back(-1);
      }
    for (int x = 0; x < problem.nin(); ++x)
      for (int q = 0; q < ne.npairs(); ++q) {
        int p = pair_of(x, esc);
        ne.edge_configs.push_back({std::min(p, q), std::max(p, q)});
      }
  }
  ne.finalize();
  return conv;
}

Labeling convert_forward_node_edge(const TreeInstance& inst, const Labeling& sigma, const RadiusLFL& radius1,
                                   const NodeEdgeConversion& conv) {
  std::map<std::array<int, 2>, int> index;
  for (std::size_t l = 0; l < conv.label_parts.size(); ++l) index[conv.label_parts[l]] = static_cast<int>(l);
  const int nout = radius1.nout();
  Labeling half(2 * inst.m());
  for (int e = 0; e < inst.m(); ++e)
    for (int s = 0; s < 2; ++s) {
      int v = inst.edges[e][s], u = inst.edges[e][1 - s];
      std::array<int, 2> key{inst.node_inputs[v] * nout + sigma[v], inst.node_inputs[u] * nout + sigma[u]};
      auto it = index.find(key);
      if (it == index.end())
        throw ConversionError("edge " + inst.ids[v] + "-" + inst.ids[u] + " has no node-edge label", {});
      half[2 * e + s] = it->second;
    }
  TreeInstance copy = inst;
  copy.fill_half_from_nodes();
  Verdict verdict = verify_node_edge(copy, half, conv.problem);
  if (!verdict.valid) throw ConversionError("forward conversion is invalid under the node-edge problem", verdict);
  return half;
}

Labeling convert_backward_node_edge(const TreeInstance& inst, const Labeling& sigma, const RadiusLFL& radius1,
                                    const NodeEdgeConversion& conv) {
  Labeling out(inst.n(), -1);
  for (int v = 0; v < inst.n(); ++v) {
    if (inst.degree(v) == 0) {
      out[v] = conv.isolated_center.at(inst.node_inputs[v]);
      if (out[v] < 0) throw ConversionError("no configuration fits the isolated node " + inst.ids[v], {});
      continue;
    }
    int e = inst.adj[v][0].second;
    int l = sigma[inst.half_at(e, v)];
    if (l == conv.escape_label) throw ConversionError("node " + inst.ids[v] + " carries the escape label", {});
    out[v] = conv.label_parts.at(l)[0] % radius1.nout();
  }
  Verdict verdict = verify_radius(inst, out, radius1);
  if (!verdict.valid) throw ConversionError("backward conversion is invalid under the radius-1 problem", verdict);
  return out;
}

namespace {

Labeling rename_outputs(const Labeling& sigma, const Alphabet& from, const Alphabet& to) {
  Labeling out(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    auto f = to.find(from.name(sigma[i]));
    if (!f) throw ConversionError("label " + from.name(sigma[i]) + " does not survive the pipeline", {});
    out[i] = *f;
  }
  return out;
}

}  // namespace

Pipeline run_pipeline(const RadiusLFL& problem, const ReduceOptions& opts) {
  Pipeline pl;
  auto elim = eliminate_auxiliary(problem);
  pl.notes.insert(pl.notes.end(), elim.warnings.begin(), elim.warnings.end());
  RadiusLFL cur = prune_unusable_outputs(elim.problem, &pl.notes);
  pl.stages.push_back({"radius-" + std::to_string(cur.radius), cur, std::nullopt});
  while (cur.radius > 1) {
    ReduceResult red = reduce_radius(cur, opts);
    pl.notes.push_back("reduced radius " + std::to_string(cur.radius) + ": " + std::to_string(red.twigs.size()) +
                       " twigs, " + std::to_string(red.problem.configs.size()) + " configurations");
    auto e = eliminate_auxiliary(red.problem);
    pl.notes.insert(pl.notes.end(), e.warnings.begin(), e.warnings.end());
    if (e.problem.configs.size() > opts.cap)
      throw PreconditionError("auxiliary elimination exceeds the cap of " + std::to_string(opts.cap) +
                              " configurations");
    cur = prune_unusable_outputs(e.problem, &pl.notes);
    pl.stages.push_back({"radius-" + std::to_string(cur.radius), cur, std::move(red)});
  }
  pl.node_edge = to_node_edge(cur);
  return pl;
}

Labeling pipeline_forward(const Pipeline& pl, const TreeInstance& inst, const Labeling& sigma,
                          const RadiusLFL& original) {
  Labeling cur = rename_outputs(sigma, original.sigma_out, pl.stages.front().radius.sigma_out);
  for (std::size_t i = 1; i < pl.stages.size(); ++i) {
    const auto& red = *pl.stages[i].reduction;
    Labeling next = convert_forward_reduce(inst, cur, pl.stages[i - 1].radius, red);
    cur = rename_outputs(next, red.problem.sigma_out, pl.stages[i].radius.sigma_out);
  }
  return convert_forward_node_edge(inst, cur, pl.stages.back().radius, pl.node_edge);
}

Labeling pipeline_backward(const Pipeline& pl, const TreeInstance& inst, const Labeling& half,
                           const RadiusLFL& original) {
  Labeling cur = convert_backward_node_edge(inst, half, pl.stages.back().radius, pl.node_edge);
  for (std::size_t i = pl.stages.size() - 1; i >= 1; --i) {
    const auto& red = *pl.stages[i].reduction;
    Labeling in_reduced = rename_outputs(cur, pl.stages[i].radius.sigma_out, red.problem.sigma_out);
    cur = convert_backward_reduce(inst, in_reduced, pl.stages[i - 1].radius, red);
  }
  Labeling out = rename_outputs(cur, pl.stages.front().radius.sigma_out, original.sigma_out);
  Verdict verdict = verify_radius(inst, out, original);
  if (!verdict.valid) throw ConversionError("pipeline backward conversion is invalid", verdict);
  return out;
}

std::optional<Labeling> solve_radius1(const TreeInstance& inst, const RadiusLFL& problem) {
  check_radius1(problem);
  const int n = inst.n();
  const int nout = problem.nout();
  if (n == 0) return Labeling{};
  std::vector<Star> stars;
  for (int ci = 0; ci < static_cast<int>(problem.configs.size()); ++ci)
    if (problem.prepared(ci).matchable) stars.push_back(star_of(problem, ci));

  std::vector<int> parent(n, -1), order{0};
  std::vector<char> visited(n, 0);
  visited[0] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (auto [w, e] : inst.adj[order[i]])
      if (!visited[w]) {
        visited[w] = 1;
        parent[w] = order[i];
        order.push_back(w);
      }
  if (static_cast<int>(order.size()) != n) throw MalformedInput("instance is not connected");

  // ok[v][a * nout + p]: subtree of v solvable with v labeled a and its parent labeled p.
  std::vector<std::vector<char>> ok(n);
  auto child_labels = [&](int v, int a, int p) -> std::optional<std::vector<int>> {
    const int xv = inst.node_inputs[v];
    const int center = xv * nout + a;
    std::vector<int> kids;
    for (auto [w, e] : inst.adj[v])
      if (w != parent[v]) kids.push_back(w);
    for (const Star& s : stars) {
      if (s.center != center) continue;
      std::map<int, std::pair<long long, bool>> need;
      for (auto [l, req] : s.neighbors) {
        auto& b = need[l];
        if (req)
          ++b.first;
        else
          b.second = true;
      }
      if (parent[v] >= 0) {
        int pl = inst.node_inputs[parent[v]] * nout + p;
        auto it = need.find(pl);
        if (it == need.end()) continue;
        if (it->second.first > 0)
          --it->second.first;
        else if (!it->second.second)
          continue;
      }
      std::vector<int> bucket_label;
      std::vector<Bucket> buckets;
      for (const auto& [l, b] : need) {
        bucket_label.push_back(l);
        buckets.push_back({b.first, b.second});
      }
      std::vector<ItemGroup> groups;
      bool dead = false;
      for (int w : kids) {
        ItemGroup g;
        g.count = 1;
        const int xw = inst.node_inputs[w];
        for (std::size_t bi = 0; bi < bucket_label.size(); ++bi) {
          int l = bucket_label[bi];
          if (l / nout == xw && ok[w][static_cast<std::size_t>(l % nout) * nout + a])
            g.allowed.push_back(static_cast<int>(bi));
        }
        if (g.allowed.empty()) {
          dead = true;
          break;
        }
        groups.push_back(std::move(g));
      }
      if (dead) continue;
      auto placed = assign_buckets(buckets, groups);
      if (!placed) continue;
      std::vector<int> labels(kids.size());
      for (std::size_t i = 0; i < kids.size(); ++i) labels[i] = bucket_label[(*placed)[i].front().first] % nout;
      return labels;
    }
    return std::nullopt;
  };

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    ok[v].assign(static_cast<std::size_t>(nout) * nout, 0);
    for (int a = 0; a < nout; ++a)
      for (int p = 0; p < (parent[v] >= 0 ? nout : 1); ++p)
        ok[v][static_cast<std::size_t>(a) * nout + p] = child_labels(v, a, p).has_value();
  }
  Labeling out(n, -1);
  for (int a = 0; a < nout && out[0] < 0; ++a)
    if (ok[0][static_cast<std::size_t>(a) * nout]) out[0] = a;
  if (out[0] < 0) return std::nullopt;
  for (int v : order) {
    auto labels = child_labels(v, out[v], parent[v] >= 0 ? out[parent[v]] : 0);
    std::size_t i = 0;
    for (auto [w, e] : inst.adj[v])
      if (w != parent[v]) out[w] = (*labels)[i++];
  }
  return out;
}

}  // namespace lfl
