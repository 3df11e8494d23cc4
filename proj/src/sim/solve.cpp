#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>

#include "lfl/sim.hpp"

namespace lfl {

namespace {

void add_child(LayerAssignment& a, const TreeInstance& t, int v, int w, int e) {
  const int hw = t.half_at(e, w), hv = t.half_at(e, v);
  a.node_vt[v].incoming.push_back({t.half_inputs[hw], t.half_inputs[hv], a.half_type[hw]});
  a.child_edges[v].push_back(e);
}

// Writes the witness labels of v's children onto both halves of each child edge.
void place_children(const TreeInstance& t, const LayerAssignment& a, const NodeEdgeLFL& p, int v,
                    const std::vector<int>& poles, Labeling& sigma) {
  auto w = virtual_tree_witness(a.node_vt[v], p, poles);
  if (!w) throw AssignmentError("no witness at node " + std::to_string(v));
  for (std::size_t i = 0; i < a.child_edges[v].size(); ++i) {
    const int e = a.child_edges[v][i];
    const int child = t.edges[e][0] == v ? t.edges[e][1] : t.edges[e][0];
    sigma[t.half_at(e, child)] = w->labels[i].first;
    sigma[t.half_at(e, v)] = w->labels[i].second;
  }
}

LayerAssignment empty_assignment(const TreeInstance& t, const NodeEdgeLFL& p) {
  LayerAssignment a;
  a.node_vt.assign(t.n(), VirtualTree{});
  a.child_edges.assign(t.n(), {});
  a.up_half.assign(t.n(), -1);
  a.pole_halves.assign(t.n(), {-1, -1});
  a.half_type.assign(2 * t.m(), Bits(p.nout()));
  return a;
}

// Types of virtual trees seen during one assignment, keyed by the order-free content.
class TypeMemo {
 public:
  explicit TypeMemo(const NodeEdgeLFL& p) : p_(&p) {}
  Bits type(const VirtualTree& vt) {
    Key key{vt.poles, vt.x, vt.poles == 2 ? vt.x_right : 0, vt.incoming};
    std::sort(key.incoming.begin(), key.incoming.end());
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Bits b = virtual_tree_type(vt, *p_);
    memo_.emplace(std::move(key), b);
    return b;
  }

 private:
  struct Key {
    int poles, x, x_right;
    std::vector<Incoming> incoming;
    bool operator<(const Key& o) const {
      return std::tie(poles, x, x_right, incoming) < std::tie(o.poles, o.x, o.x_right, o.incoming);
    }
  };
  const NodeEdgeLFL* p_;
  std::map<Key, Bits> memo_;
};

void require_half_inputs(const TreeInstance& t) {
  if (static_cast<int>(t.half_inputs.size()) != 2 * t.m())
    throw PreconditionError("instance has no half-edge inputs");
}

}  // namespace

LayerAssignment assign_layers(const TreeInstance& t, const RCDecomposition& d, const Assigner& f,
                              const NodeEdgeLFL& p) {
  require_half_inputs(t);
  auto a = empty_assignment(t, p);
  a.path_class.assign(d.paths.size(), IndependentClass{Bits(p.nout()), Bits(p.nout())});
  a.path_behaviors.assign(d.paths.size(), {});
  std::vector<int> order(t.n());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return d.key(x) < d.key(y); });
  std::vector<char> path_done(d.paths.size(), 0);
  TypeMemo memo(p);
  for (int v : order) {
    if (d.is_rake(v)) {
      int up = -1;
      for (auto [w, e] : t.adj[v]) {
        if (d.key(w) < d.key(v))
          add_child(a, t, v, w, e);
        else
          up = t.half_at(e, v);
      }
      auto& vt = a.node_vt[v];
      if (up < 0) {
        vt.poles = 0;
        if (!virtual_tree_good(vt, p)) throw AssignmentError("node " + std::to_string(v) + " is not good");
        continue;
      }
      vt.poles = 1;
      vt.x = t.half_inputs[up];
      a.up_half[v] = up;
      a.half_type[up] = memo.type(vt);
      if (a.half_type[up].none()) throw AssignmentError("empty type at node " + std::to_string(v));
      continue;
    }
    const int pi = d.path_of[v];
    if (path_done[pi]) continue;
    path_done[pi] = 1;
    const auto& path = d.paths[pi];
    const int len = static_cast<int>(path.size());
    std::vector<NodeBehavior> behaviors;
    for (int j = 0; j < len; ++j) {
      const int u = path[j];
      int left = -1, right = -1;
      std::vector<int> outer;
      for (auto [w, e] : t.adj[u]) {
        if (d.path_of[w] == pi) {
          if (j > 0 && w == path[j - 1]) left = t.half_at(e, u);
          if (j + 1 < len && w == path[j + 1]) right = t.half_at(e, u);
        } else if (d.key(w) < d.key(u)) {
          add_child(a, t, u, w, e);
        } else {
          outer.push_back(t.half_at(e, u));
        }
      }
      if (left < 0) {
        if (outer.empty()) throw AssignmentError("path end without a higher neighbor");
        left = outer.front();
        outer.erase(outer.begin());
      }
      if (right < 0) {
        if (outer.empty()) throw AssignmentError("path end without a higher neighbor");
        right = outer.front();
      }
      auto& vt = a.node_vt[u];
      vt.poles = 2;
      vt.x = t.half_inputs[left];
      vt.x_right = t.half_inputs[right];
      a.pole_halves[u] = {left, right};
      behaviors.push_back({memo.type(vt), vt.x, vt.x_right});
    }
    const auto sig = compress_path_type(behaviors, p);
    auto it = f.find(sig);
    if (it == f.end()) throw AssignmentError("assigner undefined on the signature of path " + std::to_string(pi));
    if (it->second.empty()) throw AssignmentError("assigner gives the empty class on path " + std::to_string(pi));
    a.path_class[pi] = it->second;
    a.half_type[a.pole_halves[path.front()][0]] = it->second.x;
    a.half_type[a.pole_halves[path.back()][1]] = it->second.y;
    a.path_behaviors[pi] = std::move(behaviors);
  }
  return a;
}

Labeling propagate_solution(const TreeInstance& t, const RCDecomposition& d, const LayerAssignment& a,
                            const NodeEdgeLFL& p) {
  const int k = p.nout();
  Labeling sigma(2 * t.m(), -1);
  std::vector<int> order(t.n());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return d.key(y) < d.key(x); });
  std::vector<char> path_done(d.paths.size(), 0);
  for (int v : order) {
    if (d.is_rake(v)) {
      std::vector<int> poles;
      if (a.up_half[v] >= 0) {
        const int y = sigma[a.up_half[v]];
        if (y < 0) throw AssignmentError("pole of node " + std::to_string(v) + " is unlabeled");
        poles.push_back(y);
      }
      place_children(t, a, p, v, poles, sigma);
      continue;
    }
    const int pi = d.path_of[v];
    if (path_done[pi]) continue;
    path_done[pi] = 1;
    const auto& path = d.paths[pi];
    const auto& beh = a.path_behaviors[pi];
    const int len = static_cast<int>(path.size());
    const int ys = sigma[a.pole_halves[path.front()][0]];
    const int yt = sigma[a.pole_halves[path.back()][1]];
    if (ys < 0 || yt < 0) throw AssignmentError("path " + std::to_string(pi) + " has an unlabeled end");
    auto link = [&](int j, int yr, int yl) {
      return p.edge_ok(p.pair(beh[j].x_right, yr), p.pair(beh[j + 1].x_left, yl));
    };
    // ok[j] holds pairs (yl, yr) of node j that extend to a completion of the suffix
    std::vector<Bits> ok(len, Bits(k * k));
    for (int j = len - 1; j >= 0; --j)
      for (int yl = 0; yl < k; ++yl)
        for (int yr = 0; yr < k; ++yr) {
          if (!beh[j].type.test(yl * k + yr)) continue;
          bool good = false;
          if (j == len - 1) {
            good = yr == yt;
          } else {
            for (int b : ok[j + 1].members())
              if (link(j, yr, b / k)) {
                good = true;
                break;
              }
          }
          if (good) ok[j].set(yl * k + yr);
        }
    std::vector<std::pair<int, int>> chosen(len, {-1, -1});
    for (int j = 0; j < len; ++j) {
      for (int c : ok[j].members()) {
        const int yl = c / k, yr = c % k;
        if (j == 0 ? yl != ys : !link(j - 1, chosen[j - 1].second, yl)) continue;
        chosen[j] = {yl, yr};
        break;
      }
      if (chosen[j].first < 0) throw AssignmentError("path " + std::to_string(pi) + " has no completion");
    }
    for (int j = 0; j < len; ++j) {
      const int u = path[j];
      sigma[a.pole_halves[u][0]] = chosen[j].first;
      sigma[a.pole_halves[u][1]] = chosen[j].second;
    }
    for (int j = 0; j < len; ++j) place_children(t, a, p, path[j], {chosen[j].first, chosen[j].second}, sigma);
  }
  return sigma;
}

std::optional<Labeling> solve_diameter(const TreeInstance& t, const NodeEdgeLFL& p) {
  require_half_inputs(t);
  auto a = empty_assignment(t, p);
  TypeMemo memo(p);
  std::vector<int> order{0}, parent(t.n(), -1);
  std::vector<char> seen(t.n(), 0);
  seen[0] = 1;
  for (std::size_t q = 0; q < order.size(); ++q)
    for (auto [w, e] : t.adj[order[q]])
      if (!seen[w]) {
        seen[w] = 1;
        parent[w] = e;
        order.push_back(w);
      }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    for (auto [w, e] : t.adj[v])
      if (e != parent[v]) add_child(a, t, v, w, e);
    auto& vt = a.node_vt[v];
    if (parent[v] < 0) {
      vt.poles = 0;
      if (!virtual_tree_good(vt, p)) return std::nullopt;
      continue;
    }
    const int up = t.half_at(parent[v], v);
    vt.poles = 1;
    vt.x = t.half_inputs[up];
    a.up_half[v] = up;
    a.half_type[up] = memo.type(vt);
    if (a.half_type[up].none()) return std::nullopt;
  }
  Labeling sigma(2 * t.m(), -1);
  for (int v : order) {
    std::vector<int> poles;
    if (a.up_half[v] >= 0) poles.push_back(sigma[a.up_half[v]]);
    place_children(t, a, p, v, poles, sigma);
  }
  return sigma;
}

std::optional<Labeling> brute_force_solve(const TreeInstance& t, const NodeEdgeLFL& p, std::uint64_t cap) {
  require_half_inputs(t);
  const int halves = 2 * t.m();
  const int k = p.nout();
  std::vector<PairCounts> counts(t.n());
  std::vector<int> pending(t.n());
  for (int v = 0; v < t.n(); ++v) pending[v] = t.degree(v);

  auto partial_ok = [&](int v) {
    if (pending[v] == 0) {
      for (const auto& c : p.node_configs)
        if (match_node_config(counts[v], c)) return true;
      return false;
    }
    for (const auto& c : p.node_configs) {
      bool fits = true, any_star = false;
      int deficit = 0;
      for (const auto& e : c) {
        any_star = any_star || e.star;
        auto it = counts[v].find(e.pair);
        const int have = it == counts[v].end() ? 0 : it->second;
        if (!e.star && have > e.count) fits = false;
        deficit += std::max(0, e.count - have);
      }
      for (const auto& [pair, cnt] : counts[v]) {
        bool listed = false;
        for (const auto& e : c) listed = listed || e.pair == pair;
        if (!listed) fits = false;
      }
      if (fits && deficit <= pending[v] && (deficit == pending[v] || any_star)) return true;
    }
    return false;
  };

  if (t.m() == 0) {
    if (t.n() == 0 || partial_ok(0)) return Labeling{};
    return std::nullopt;
  }
  Labeling sigma(halves, -1);
  std::uint64_t visited = 0;
  // Explicit stack of the next label to try per half.
  int h = 0;
  std::vector<int> next(halves, 0);
  while (h >= 0) {
    if (h == halves) return sigma;
    const int v = t.half_node(h);
    if (sigma[h] >= 0) {
      const int pr = p.pair(t.half_inputs[h], sigma[h]);
      if (--counts[v][pr] == 0) counts[v].erase(pr);
      ++pending[v];
      sigma[h] = -1;
    }
    bool placed = false;
    while (next[h] < k) {
      const int y = next[h]++;
      if (++visited > cap) throw PreconditionError("brute force exceeded its search cap");
      const int pr = p.pair(t.half_inputs[h], y);
      if (h % 2 == 1 && !p.edge_ok(p.pair(t.half_inputs[h - 1], sigma[h - 1]), pr)) continue;
      ++counts[v][pr];
      --pending[v];
      if (partial_ok(v)) {
        sigma[h] = y;
        placed = true;
        break;
      }
      if (--counts[v][pr] == 0) counts[v].erase(pr);
      ++pending[v];
    }
    if (placed) {
      ++h;
      if (h < halves) next[h] = 0;
    } else {
      --h;
    }
  }
  return std::nullopt;
}

namespace {

int tree_diameter(const TreeInstance& t) {
  if (t.n() <= 1) return 0;
  auto far = [&](int s, int* dist_out) {
    std::vector<int> dist(t.n(), -1);
    std::queue<int> q;
    dist[s] = 0;
    q.push(s);
    int last = s;
    while (!q.empty()) {
      last = q.front();
      q.pop();
      for (auto [w, e] : t.adj[last])
        if (dist[w] < 0) {
          dist[w] = dist[last] + 1;
          q.push(w);
        }
    }
    *dist_out = dist[last];
    return last;
  };
  int d = 0;
  const int a = far(0, &d);
  far(a, &d);
  return d;
}

}  // namespace

SolveReport solve_instance(const TreeInstance& t, const NodeEdgeLFL& p, const SolveOptions& opts) {
  SolveReport r;
  try {
    if (opts.mode == SolveMode::Diameter) {
      r.labeling = solve_diameter(t, p);
      r.rounds = tree_diameter(t);
      r.accounting.push_back({"diameter", r.rounds});
      if (!r.labeling) r.error = "instance has no solution";
    } else {
      static const Assigner kNone;
      const Assigner& f = opts.assigner ? *opts.assigner : kNone;
      const auto d = opts.mode == SolveMode::Poly ? rc_decompose_poly(t, opts.ell, opts.k)
                                                  : rc_decompose_log(t, opts.ell, opts.log_gamma);
      const auto la = assign_layers(t, d, f, p);
      r.labeling = propagate_solution(t, d, la, p);
      r.rounds = d.rounds();
      r.layers = d.k;
      r.accounting = d.accounting;
    }
  } catch (const std::exception& e) {
    r.labeling.reset();
    r.error = e.what();
  }
  if (r.labeling) {
    const auto v = verify_node_edge(t, *r.labeling, p);
    r.valid = v.valid;
    if (!v.valid) r.error = "labeling fails verification";
  }
  return r;
}

std::vector<SolveReport> solve_batch(const std::vector<TreeInstance>& ts, const NodeEdgeLFL& p,
                                     const SolveOptions& opts, bool parallel) {
  std::vector<SolveReport> out(ts.size());
  const long long n = static_cast<long long>(ts.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) out[i] = solve_instance(ts[i], p, opts);
  } else {
    for (long long i = 0; i < n; ++i) out[i] = solve_instance(ts[i], p, opts);
  }
  return out;
}

SolveOptions solve_options_for(const Classification& c) {
  SolveOptions o;
  o.ell = c.ell;
  o.assigner = &c.search.assigner;
  switch (c.kind) {
    case VerdictKind::Logarithmic:
      o.mode = SolveMode::Log;
      break;
    case VerdictKind::PolyTheta:
      o.mode = SolveMode::Poly;
      o.k = c.exponent;
      break;
    case VerdictKind::Unsolvable:
      o.mode = SolveMode::Diameter;
      break;
  }
  return o;
}

}  // namespace lfl
