#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>
#include <set>

#include "lfl/assign.hpp"
#include "lfl/core.hpp"

namespace lfl {

namespace {

std::vector<int> config_distances(const RadiusConfiguration& c) {
  std::vector<std::vector<int>> adj(c.size());
  for (const auto& e : c.edges)
    if (e.u != e.v) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
  std::vector<int> dist(c.size(), -1);
  std::queue<int> q;
  dist[c.center] = 0;
  q.push(c.center);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int w : adj[u])
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        q.push(w);
      }
  }
  return dist;
}

}  // namespace

PreparedConfig prepare_config(const RadiusConfiguration& c, int radius, bool allow_disconnected) {
  const int n = c.size();
  if (n == 0) throw MalformedInput("configuration '" + c.name + "' has no nodes");
  if (c.center < 0 || c.center >= n) throw MalformedInput("configuration '" + c.name + "' has an invalid center");
  if (static_cast<int>(c.out.size()) != n) throw MalformedInput("configuration '" + c.name + "' has missing labels");
  for (const auto& e : c.edges)
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
      throw MalformedInput("configuration '" + c.name + "' has an edge with an unknown endpoint");

  auto dist = config_distances(c);
  for (int w = 0; w < n; ++w)
    if (dist[w] < 0 || dist[w] > radius)
      throw MalformedInput("configuration '" + c.name + "' is not a radius-" + std::to_string(radius) + " ball");
  for (const auto& e : c.edges)
    if (1 + std::min(dist[e.u], dist[e.v]) > radius)
      throw MalformedInput("configuration '" + c.name + "' has an edge beyond the radius");

  PreparedConfig p;
  p.in_required.assign(n, 0);
  p.req_children.assign(n, {});
  p.opt_neighbors.assign(n, {});
  std::vector<std::vector<int>> req_adj(n);
  int required_edges = 0;
  for (const auto& e : c.edges) {
    if (!e.required) continue;
    if (e.u == e.v) {
      p.matchable = false;  // a tree never hits a self-loop
      continue;
    }
    ++required_edges;
    p.in_required[e.u] = p.in_required[e.v] = 1;
    req_adj[e.u].push_back(e.v);
    req_adj[e.v].push_back(e.u);
  }
  if (required_edges > 0) {
    // The required subgraph must be a tree containing the center.
    std::vector<int> parent(n, -2);
    std::vector<int> stack{c.center};
    parent[c.center] = -1;
    int seen = 0;
    bool cyclic = false;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      ++seen;
      for (int w : req_adj[u]) {
        if (w == parent[u]) continue;
        if (parent[w] != -2) {
          cyclic = true;
          continue;
        }
        parent[w] = u;
        p.req_children[u].push_back(w);
        stack.push_back(w);
      }
    }
    int total = 0;
    for (int w = 0; w < n; ++w) total += p.in_required[w];
    bool connected = p.in_required[c.center] && seen == total;
    if (!connected) {
      if (!allow_disconnected)
        throw MalformedInput("configuration '" + c.name +
                             "': required edges do not form a connected subgraph containing the center");
      p.matchable = false;
    }
    // Parallel required edges between the same pair also form a cycle.
    std::set<std::pair<int, int>> pairs;
    for (const auto& e : c.edges)
      if (e.required && e.u != e.v && !pairs.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second) cyclic = true;
    if (cyclic) p.matchable = false;
  }
  for (const auto& e : c.edges) {
    if (e.u == e.v) continue;
    if (!p.in_required[e.v]) p.opt_neighbors[e.u].push_back(e.v);
    if (!p.in_required[e.u]) p.opt_neighbors[e.v].push_back(e.u);
  }
  for (auto& v : p.opt_neighbors) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return p;
}

void RadiusLFL::finalize() {
  if (radius < 1) throw MalformedInput("radius must be positive");
  if (nout() == 0) throw MalformedInput("sigma_out must be non-empty");
  if (nin() == 0) throw MalformedInput("sigma_in must be non-empty");
  const int L = nlabels();
  leq_.assign(static_cast<std::size_t>(L) * L, 0);
  for (int a = 0; a < L; ++a) leq_[static_cast<std::size_t>(a) * L + a] = 1;
  for (auto [a, b] : order) {
    if (a < 0 || b < 0 || a >= L || b >= L) throw MalformedInput("order references an unknown label");
    leq_[static_cast<std::size_t>(a) * L + b] = 1;
  }
  for (int k = 0; k < L; ++k)
    for (int i = 0; i < L; ++i)
      if (leq_[static_cast<std::size_t>(i) * L + k])
        for (int j = 0; j < L; ++j)
          if (leq_[static_cast<std::size_t>(k) * L + j]) leq_[static_cast<std::size_t>(i) * L + j] = 1;
  for (int a = 0; a < L; ++a)
    for (int b = a + 1; b < L; ++b)
      if (le(a, b) && le(b, a)) throw MalformedInput("order is not antisymmetric");
  prepared_.clear();
  for (const auto& c : configs) {
    if (static_cast<int>(c.in.size()) != c.size()) throw MalformedInput("configuration '" + c.name + "' lacks inputs");
    for (int w = 0; w < c.size(); ++w)
      if (c.in[w] < 0 || c.in[w] >= nin() || c.out[w] < 0 || c.out[w] >= L)
        throw MalformedInput("configuration '" + c.name + "' uses an unknown label");
    prepared_.push_back(prepare_config(c, radius, allow_disconnected_required));
  }
}

bool RadiusLFL::trivial_order() const {
  if (aux.size() > 0) return false;
  for (int a = 0; a < nout(); ++a)
    for (int b = 0; b < nout(); ++b)
      if (a != b && le(a, b)) return false;
  return true;
}

std::string RadiusLFL::label_name(int l) const {
  return l < nout() ? sigma_out.name(l) : aux.name(l - nout());
}

namespace {

// The r-ball of v as a rooted tree.
struct View {
  std::vector<int> nodes;  // instance node ids in BFS order
  std::vector<int> depth;
  std::vector<std::vector<int>> children;  // indices into nodes
};

View extract_view(const TreeInstance& inst, int v, int r) {
  View view;
  view.nodes.push_back(v);
  view.depth.push_back(0);
  view.children.push_back({});
  std::vector<int> parent{-1};
  for (std::size_t i = 0; i < view.nodes.size(); ++i) {
    if (view.depth[i] == r) continue;
    int z = view.nodes[i];
    for (auto [w, e] : inst.adj[z]) {
      if (parent[i] >= 0 && w == view.nodes[parent[i]]) continue;
      int id = static_cast<int>(view.nodes.size());
      view.nodes.push_back(w);
      view.depth.push_back(view.depth[i] + 1);
      view.children.push_back({});
      parent.push_back(static_cast<int>(i));
      view.children[i].push_back(id);
    }
  }
  return view;
}

class Matcher {
 public:
  Matcher(const TreeInstance& inst, const Labeling& outputs, const RadiusLFL& problem, int config, const View& view)
      : inst_(inst),
        outputs_(outputs),
        problem_(problem),
        c_(problem.configs[config]),
        p_(problem.prepared(config)),
        view_(view),
        k_(c_.size()),
        memo_(view.nodes.size() * c_.size(), -1) {}

  bool feasible(int z, int w) {
    int8_t& m = memo_[static_cast<std::size_t>(z) * k_ + w];
    if (m >= 0) return m;
    m = compute(z, w, nullptr) ? 1 : 0;
    return m;
  }

  void build(int z, int w, std::vector<int>& f) {
    f[view_.nodes[z]] = w;
    std::vector<int> images;
    compute(z, w, &images);
    for (std::size_t i = 0; i < view_.children[z].size(); ++i) build(view_.children[z][i], images[i], f);
  }

 private:
  bool label_ok(int z, int w) const {
    int node = view_.nodes[z];
    return inst_.node_inputs[node] == c_.in[w] && problem_.le(outputs_[node], c_.out[w]);
  }

  bool compute(int z, int w, std::vector<int>* images) {
    if (!label_ok(z, w)) return false;
    const auto& kids = view_.children[z];
    if (!p_.in_required[w]) {
      for (int child : kids) {
        int found = -1;
        for (int w2 : p_.opt_neighbors[w])
          if (feasible(child, w2)) {
            found = w2;
            break;
          }
        if (found < 0) return false;
        if (images) images->push_back(found);
      }
      return true;
    }
    const auto& req = p_.req_children[w];
    if (kids.size() < req.size()) return false;
    std::vector<Bucket> buckets(req.size() + 1);
    for (std::size_t i = 0; i < req.size(); ++i) buckets[i] = {1, false};
    buckets[req.size()] = {0, true};
    std::vector<ItemGroup> groups;
    std::vector<int> opt_choice(kids.size(), -1);
    for (std::size_t ci = 0; ci < kids.size(); ++ci) {
      ItemGroup g;
      g.count = 1;
      for (std::size_t i = 0; i < req.size(); ++i)
        if (feasible(kids[ci], req[i])) g.allowed.push_back(static_cast<int>(i));
      for (int w2 : p_.opt_neighbors[w])
        if (feasible(kids[ci], w2)) {
          opt_choice[ci] = w2;
          g.allowed.push_back(static_cast<int>(req.size()));
          break;
        }
      if (g.allowed.empty()) return false;
      groups.push_back(std::move(g));
    }
    auto placed = assign_buckets(buckets, groups);
    if (!placed) return false;
    if (images) {
      for (std::size_t ci = 0; ci < kids.size(); ++ci) {
        int b = (*placed)[ci].front().first;
        images->push_back(b < static_cast<int>(req.size()) ? req[b] : opt_choice[ci]);
      }
    }
    return true;
  }

  const TreeInstance& inst_;
  const Labeling& outputs_;
  const RadiusLFL& problem_;
  const RadiusConfiguration& c_;
  const PreparedConfig& p_;
  const View& view_;
  std::size_t k_;
  std::vector<int8_t> memo_;
};

void check_radius_inputs(const TreeInstance& inst, const Labeling& outputs, const RadiusLFL& problem) {
  if (static_cast<int>(outputs.size()) != inst.n()) throw MalformedInput("labeling is not total over nodes");
  if (static_cast<int>(inst.node_inputs.size()) != inst.n()) throw MalformedInput("node inputs missing");
  for (int v = 0; v < inst.n(); ++v) {
    if (outputs[v] < 0 || outputs[v] >= problem.nout()) throw MalformedInput("labeling uses an unknown output");
    if (inst.node_inputs[v] < 0 || inst.node_inputs[v] >= problem.nin()) throw MalformedInput("unknown input");
  }
}

}  // namespace

std::optional<std::vector<int>> match_radius_configuration(const TreeInstance& inst, const Labeling& outputs, int v,
                                                           const RadiusLFL& problem, int config) {
  check_radius_inputs(inst, outputs, problem);
  if (!problem.prepared(config).matchable) return std::nullopt;
  View view = extract_view(inst, v, problem.radius);
  Matcher m(inst, outputs, problem, config, view);
  if (!m.feasible(0, problem.configs[config].center)) return std::nullopt;
  std::vector<int> f(inst.n(), -1);
  m.build(0, problem.configs[config].center, f);
  return f;
}

bool node_matches_some_config(const TreeInstance& inst, const Labeling& outputs, int v, const RadiusLFL& problem) {
  View view = extract_view(inst, v, problem.radius);
  for (int c = 0; c < static_cast<int>(problem.configs.size()); ++c) {
    const auto& cfg = problem.configs[c];
    if (!problem.prepared(c).matchable) continue;
    if (cfg.in[cfg.center] != inst.node_inputs[v] || !problem.le(outputs[v], cfg.out[cfg.center])) continue;
    Matcher m(inst, outputs, problem, c, view);
    if (m.feasible(0, cfg.center)) return true;
  }
  return false;
}

Verdict verify_radius(const TreeInstance& inst, const Labeling& outputs, const RadiusLFL& problem) {
  check_radius_inputs(inst, outputs, problem);
  Verdict verdict;
  for (int v = 0; v < inst.n(); ++v)
    if (!node_matches_some_config(inst, outputs, v, problem))
      verdict.violations.push_back({Violation::Kind::Node, v, "r-ball matches no configuration"});
  verdict.valid = verdict.violations.empty();
  return verdict;
}

namespace {

// Removes nodes that are unreachable from the center, renumbering the rest.
RadiusConfiguration drop_unreachable(const RadiusConfiguration& c) {
  auto dist = config_distances(c);
  std::vector<int> remap(c.size(), -1);
  RadiusConfiguration out;
  out.name = c.name;
  for (int w = 0; w < c.size(); ++w)
    if (dist[w] >= 0) {
      remap[w] = out.size();
      out.in.push_back(c.in[w]);
      out.out.push_back(c.out[w]);
    }
  out.center = remap[c.center];
  for (const auto& e : c.edges)
    if (remap[e.u] >= 0 && remap[e.v] >= 0) out.edges.push_back({remap[e.u], remap[e.v], e.required});
  return out;
}

RadiusConfiguration remove_node(const RadiusConfiguration& c, int node) {
  RadiusConfiguration out;
  out.name = c.name;
  std::vector<int> remap(c.size(), -1);
  for (int w = 0; w < c.size(); ++w)
    if (w != node) {
      remap[w] = out.size();
      out.in.push_back(c.in[w]);
      out.out.push_back(c.out[w]);
    }
  out.center = remap[c.center];
  for (const auto& e : c.edges)
    if (e.u != node && e.v != node) out.edges.push_back({remap[e.u], remap[e.v], e.required});
  return out;
}

}  // namespace

EliminationResult eliminate_auxiliary(const RadiusLFL& problem) {
  EliminationResult result;
  RadiusLFL& out = result.problem;
  out.sigma_in = problem.sigma_in;
  out.sigma_out = problem.sigma_out;
  out.radius = problem.radius;
  out.allow_disconnected_required = problem.allow_disconnected_required;
  const int nout = problem.nout();

  std::vector<std::vector<int>> down(problem.nlabels());
  for (int l = 0; l < problem.nlabels(); ++l)
    for (int y = 0; y < nout; ++y)
      if (problem.le(y, l)) down[l].push_back(y);
  auto needs_expansion = [&](int l) { return !(down[l].size() == 1 && down[l][0] == l); };

  std::vector<RadiusConfiguration> work(problem.configs.begin(), problem.configs.end());
  std::vector<RadiusConfiguration> done;
  while (!work.empty()) {
    RadiusConfiguration c = std::move(work.back());
    work.pop_back();
    int target = -1;
    for (int w = 0; w < c.size(); ++w)
      if (needs_expansion(c.out[w])) {
        target = w;
        break;
      }
    if (target < 0) {
      done.push_back(std::move(c));
      continue;
    }
    const auto& ys = down[c.out[target]];
    bool required = target == c.center;
    for (const auto& e : c.edges)
      if (e.required && (e.u == target || e.v == target)) required = true;
    if (ys.empty())
      result.warnings.push_back("configuration '" + c.name + "': label '" + problem.label_name(c.out[target]) +
                                "' dominates no output symbol");
    if (required) {
      for (int y : ys) {
        RadiusConfiguration copy = c;
        copy.out[target] = y;
        work.push_back(std::move(copy));
      }
      continue;
    }
    RadiusConfiguration next = c;
    std::vector<ConfigEdge> incident;
    for (const auto& e : c.edges)
      if (e.u == target || e.v == target) incident.push_back(e);
    for (std::size_t i = 1; i < ys.size(); ++i) {
      int copy = next.size();
      next.in.push_back(c.in[target]);
      next.out.push_back(ys[i]);
      for (const auto& e : incident) {
        int a = e.u == target ? copy : e.u;
        int b = e.v == target ? copy : e.v;
        next.edges.push_back({a, b, e.required});
      }
    }
    if (ys.empty()) {
      next = drop_unreachable(remove_node(next, target));
    } else {
      next.out[target] = ys[0];
    }
    work.push_back(std::move(next));
  }
  std::reverse(done.begin(), done.end());
  out.configs = std::move(done);
  out.finalize();
  return result;
}

RadiusLFL prune_unusable_outputs(const RadiusLFL& problem, std::vector<std::string>* notes) {
  for (int a = 0; a < problem.nout(); ++a)
    for (int b = 0; b < problem.nout(); ++b)
      if (a != b && problem.le(a, b))
        throw PreconditionError("output pruning requires outputs to be pairwise incomparable");
  std::vector<char> usable(problem.nout(), 0);
  for (const auto& c : problem.configs)
    for (int y = 0; y < problem.nout(); ++y)
      if (problem.le(y, c.out[c.center])) usable[y] = 1;
  RadiusLFL out;
  out.sigma_in = problem.sigma_in;
  out.radius = problem.radius;
  out.allow_disconnected_required = problem.allow_disconnected_required;
  std::vector<int> remap(problem.nlabels(), -1);
  for (int y = 0; y < problem.nout(); ++y)
    if (usable[y]) remap[y] = out.sigma_out.add(problem.sigma_out.name(y));
  for (int a = 0; a < problem.aux.size(); ++a)
    remap[problem.nout() + a] = out.sigma_out.size() + out.aux.add(problem.aux.name(a));
  std::vector<char> dead(problem.nlabels(), 0);
  for (int l = 0; l < problem.nlabels(); ++l) {
    bool any = false;
    for (int y = 0; y < problem.nout(); ++y)
      if (usable[y] && problem.le(y, l)) any = true;
    dead[l] = !any;
  }
  for (int a = 0; a < problem.nlabels(); ++a)
    for (int b = 0; b < problem.nlabels(); ++b)
      if (a != b && problem.le(a, b) && remap[a] >= 0 && remap[b] >= 0) out.order.push_back({remap[a], remap[b]});

  int dropped_configs = 0;
  for (const auto& c : problem.configs) {
    RadiusConfiguration cur = c;
    bool keep = true;
    for (;;) {
      int bad = -1;
      for (int w = 0; w < cur.size(); ++w)
        if (dead[cur.out[w]]) {
          bad = w;
          break;
        }
      if (bad < 0) break;
      bool required = bad == cur.center;
      for (const auto& e : cur.edges)
        if (e.required && (e.u == bad || e.v == bad)) required = true;
      if (required) {
        keep = false;
        break;
      }
      cur = drop_unreachable(remove_node(cur, bad));
    }
    if (!keep) {
      ++dropped_configs;
      continue;
    }
    for (auto& l : cur.out) l = remap[l];
    out.configs.push_back(std::move(cur));
  }
  if (notes) {
    int dropped_labels = problem.nout() - out.sigma_out.size();
    if (dropped_labels > 0 || dropped_configs > 0)
      notes->push_back("pruned " + std::to_string(dropped_labels) + " unusable output labels and " +
                       std::to_string(dropped_configs) + " configurations");
  }
  out.finalize();
  return out;
}

}  // namespace lfl
