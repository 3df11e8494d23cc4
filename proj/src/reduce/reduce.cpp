#include "lfl/reduce.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace lfl {

bool StarProfile::admits(const std::map<int, int>& ball) const {
  for (auto [l, cnt] : ball) {
    auto it = nbr.find(l);
    if (it == nbr.end()) {
      if (cnt != 0) return false;
    } else if (!it->second.admits(cnt)) {
      return false;
    }
  }
  for (const auto& [l, range] : nbr)
    if (!ball.contains(l) && !range.admits(0)) return false;
  return true;
}

namespace {

struct ConfigTree {
  std::vector<int> parent;
  std::vector<int> depth;
  std::vector<char> required_up;  // edge to the parent is required
  std::vector<std::vector<int>> children;
};

ConfigTree config_tree(const RadiusConfiguration& c) {
  const int n = c.size();
  std::vector<std::vector<std::pair<int, bool>>> adj(n);
  int edges = 0;
  std::set<std::pair<int, int>> seen;
  for (const auto& e : c.edges) {
    if (e.u == e.v) continue;
    if (!seen.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second)
      throw PreconditionError("configuration '" + c.name + "' has parallel edges");
    adj[e.u].push_back({e.v, e.required});
    adj[e.v].push_back({e.u, e.required});
    ++edges;
  }
  if (edges != n - 1) throw PreconditionError("configuration '" + c.name + "' is not tree-shaped");
  ConfigTree t;
  t.parent.assign(n, -2);
  t.depth.assign(n, 0);
  t.required_up.assign(n, 0);
  t.children.assign(n, {});
  std::vector<int> order{c.center};
  t.parent[c.center] = -1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    int u = order[i];
    for (auto [w, req] : adj[u]) {
      if (w == t.parent[u]) continue;
      if (t.parent[w] != -2) throw PreconditionError("configuration '" + c.name + "' is not tree-shaped");
      t.parent[w] = u;
      t.depth[w] = t.depth[u] + 1;
      t.required_up[w] = req;
      t.children[u].push_back(w);
      order.push_back(w);
    }
  }
  if (static_cast<int>(order.size()) != n) throw PreconditionError("configuration '" + c.name + "' is not connected");
  return t;
}

int node_label(const RadiusConfiguration& c, int w, int nout) { return c.in[w] * nout + c.out[w]; }

StarProfile node_profile(const RadiusConfiguration& c, const ConfigTree& t, int w, int nout) {
  StarProfile p;
  p.center = node_label(c, w, nout);
  auto add = [&](int u, bool req) {
    auto& r = p.nbr[node_label(c, u, nout)];
    if (req)
      ++r.count;
    else
      r.open = true;
  };
  if (t.parent[w] >= 0) add(t.parent[w], true);
  for (int ch : t.children[w]) add(ch, t.required_up[ch]);
  return p;
}

std::optional<CountRange> intersect_range(CountRange a, CountRange b) {
  if (a.open && b.open) return CountRange{std::max(a.count, b.count), true};
  if (a.open) return b.count >= a.count ? std::optional(b) : std::nullopt;
  if (b.open) return a.count >= b.count ? std::optional(a) : std::nullopt;
  return a.count == b.count ? std::optional(a) : std::nullopt;
}

std::optional<StarProfile> intersect_profiles(const StarProfile& a, const StarProfile& b) {
  if (a.center != b.center) return std::nullopt;
  StarProfile r;
  r.center = a.center;
  std::set<int> labels;
  for (const auto& [l, x] : a.nbr) labels.insert(l);
  for (const auto& [l, x] : b.nbr) labels.insert(l);
  for (int l : labels) {
    CountRange x = a.nbr.contains(l) ? a.nbr.at(l) : CountRange{};
    CountRange y = b.nbr.contains(l) ? b.nbr.at(l) : CountRange{};
    auto z = intersect_range(x, y);
    if (!z) return std::nullopt;
    if (z->count > 0 || z->open) r.nbr[l] = *z;
  }
  return r;
}

std::string twig_set_name(const TwigSet& X, const std::vector<TwigConfiguration>& twigs) {
  std::string s = "{";
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (i) s += ",";
    s += twigs[X[i]].ball.name;
  }
  return s + "}";
}

std::string canonical_below(const RadiusConfiguration& c, const ConfigTree& t, int w) {
  std::vector<std::string> kids;
  for (int ch : t.children[w]) kids.push_back((t.required_up[ch] ? "R" : "O") + canonical_below(c, t, ch));
  std::sort(kids.begin(), kids.end());
  std::string s = "(" + std::to_string(c.in[w]) + ":" + std::to_string(c.out[w]);
  for (const auto& k : kids) s += k;
  return s + ")";
}

void check_reducible(const RadiusLFL& problem) {
  if (problem.radius < 2) throw PreconditionError("radius reduction needs radius at least 2");
  if (!problem.trivial_order()) throw PreconditionError("radius reduction needs an order-free problem");
}

}  // namespace

std::string configuration_canonical(const RadiusConfiguration& c, int root) {
  RadiusConfiguration rooted = c;
  if (root >= 0) rooted.center = root;
  ConfigTree t = config_tree(rooted);
  return canonical_below(rooted, t, rooted.center);
}

std::vector<TwigConfiguration> twig_configurations(const RadiusLFL& problem) {
  check_reducible(problem);
  const int nout = problem.nout();
  std::vector<TwigConfiguration> twigs;
  std::map<StarProfile, int> index;
  for (int ci = 0; ci < static_cast<int>(problem.configs.size()); ++ci) {
    if (!problem.prepared(ci).matchable) continue;
    const auto& c = problem.configs[ci];
    ConfigTree t = config_tree(c);
    std::vector<int> order{c.center};
    for (std::size_t i = 0; i < order.size(); ++i)
      for (int ch : t.children[order[i]]) order.push_back(ch);
    for (int w : order) {
      if (t.depth[w] != problem.radius - 1) continue;
      StarProfile p = node_profile(c, t, w, nout);
      if (index.contains(p)) continue;
      index[p] = static_cast<int>(twigs.size());
      TwigConfiguration tw;
      tw.profile = p;
      tw.parent_config = ci;
      tw.twig_node = w;
      RadiusConfiguration& b = tw.ball;
      b.name = "T" + std::to_string(twigs.size() + 1);
      b.center = 0;
      b.in = {c.in[w], c.in[t.parent[w]]};
      b.out = {c.out[w], c.out[t.parent[w]]};
      b.edges.push_back({0, 1, true});
      for (int ch : t.children[w]) {
        b.edges.push_back({0, b.size(), static_cast<bool>(t.required_up[ch])});
        b.in.push_back(c.in[ch]);
        b.out.push_back(c.out[ch]);
      }
      tw.canonical = configuration_canonical(b);
      twigs.push_back(std::move(tw));
    }
  }
  return twigs;
}

std::optional<StarProfile> intersect_twig_set(const std::vector<TwigConfiguration>& twigs, const TwigSet& X) {
  if (X.empty()) throw PreconditionError("C_X is undefined for the empty twig set");
  std::optional<StarProfile> acc = twigs.at(X[0]).profile;
  for (std::size_t i = 1; i < X.size() && acc; ++i) acc = intersect_profiles(*acc, twigs.at(X[i]).profile);
  return acc;
}

RadiusConfiguration star_configuration(const StarProfile& p, int nout, const std::string& name) {
  RadiusConfiguration c;
  c.name = name;
  c.center = 0;
  c.in = {p.center / nout};
  c.out = {p.center % nout};
  auto add = [&](int l, bool req) {
    c.edges.push_back({0, c.size(), req});
    c.in.push_back(l / nout);
    c.out.push_back(l % nout);
  };
  for (const auto& [l, r] : p.nbr) {
    for (int i = 0; i < r.count; ++i) add(l, true);
    if (r.open) add(l, false);
  }
  return c;
}

std::vector<CombinedConfiguration> combine_configurations(const RadiusLFL& problem, int config,
                                                          const std::vector<TwigConfiguration>& twigs,
                                                          const StarProfile& cx, const TwigSet& X) {
  const auto& C = problem.configs.at(config);
  const int nout = problem.nout();
  const int r = problem.radius;
  ConfigTree t = config_tree(C);
  if (node_label(C, C.center, nout) != cx.center) return {};

  std::map<int, std::vector<int>> req_nb, opt_nb;
  std::set<int> labels;
  for (int u : t.children[C.center]) {
    int l = node_label(C, u, nout);
    (t.required_up[u] ? req_nb : opt_nb)[l].push_back(u);
    labels.insert(l);
  }
  for (const auto& [l, range] : cx.nbr) labels.insert(l);

  struct Choice {
    std::vector<std::pair<int, bool>> attach;  // (original neighbor, required)
    std::string code;
  };
  std::vector<std::vector<Choice>> per_label;
  for (int l : labels) {
    const auto& req = req_nb[l];
    const auto& A = opt_nb[l];
    CountRange b = cx.nbr.contains(l) ? cx.nbr.at(l) : CountRange{};
    int a = static_cast<int>(req.size());
    std::string lname = std::to_string(l);
    std::vector<Choice> choices;
    auto with = [&](bool opt_too) {
      Choice ch;
      for (int u : req) ch.attach.push_back({u, true});
      if (opt_too)
        for (int u : A) ch.attach.push_back({u, false});
      return ch;
    };
    if (a > b.count) {
      if (!b.open) return {};
      Choice ch = with(true);
      ch.code = lname + ":1b";
      choices.push_back(ch);
    } else if (a == b.count) {
      Choice ch = with(b.open);
      ch.code = lname + (b.open ? ":2b" : ":2a");
      choices.push_back(ch);
    } else {
      if (A.empty()) return {};
      int d = b.count - a;
      std::vector<int> pick(d, 0);
      for (;;) {
        Choice ch = with(b.open);
        for (int i : pick) ch.attach.push_back({A[i], true});
        ch.code = lname + ":3b";
        choices.push_back(std::move(ch));
        if (choices.size() > 10000000) throw PreconditionError("combination exceeds the enumeration limit");
        int k = d - 1;
        while (k >= 0 && pick[k] == static_cast<int>(A.size()) - 1) --k;
        if (k < 0) break;
        int v = pick[k] + 1;
        for (int j = k; j < d; ++j) pick[j] = v;
      }
    }
    per_label.push_back(std::move(choices));
  }

  std::map<StarProfile, int> twig_index;
  for (int i = 0; i < static_cast<int>(twigs.size()); ++i) twig_index[twigs[i].profile] = i;

  std::vector<CombinedConfiguration> out;
  std::vector<std::size_t> idx(per_label.size(), 0);
  for (;;) {
    CombinedConfiguration cc;
    RadiusConfiguration& K = cc.config;
    K.name = C.name;
    K.center = 0;
    K.in = {C.in[C.center]};
    K.out = {C.out[C.center]};
    std::function<void(int, int, bool)> clone = [&](int orig, int parent_new, bool req) {
      int id = K.size();
      K.in.push_back(C.in[orig]);
      K.out.push_back(C.out[orig]);
      K.edges.push_back({parent_new, id, req});
      for (int ch : t.children[orig]) clone(ch, id, t.required_up[ch]);
    };
    std::string trace;
    for (std::size_t i = 0; i < per_label.size(); ++i) {
      const Choice& ch = per_label[i][idx[i]];
      for (auto [u, req] : ch.attach) clone(u, 0, req);
      if (!trace.empty()) trace += " ";
      trace += ch.code;
    }
    cc.trace = C.name + " X=" + twig_set_name(X, twigs) + " " + trace;
    ConfigTree kt = config_tree(K);
    cc.twig_of.assign(K.size(), -1);
    for (int w = 0; w < K.size(); ++w)
      if (kt.depth[w] == r - 1) {
        auto it = twig_index.find(node_profile(K, kt, w, nout));
        if (it == twig_index.end()) throw std::logic_error("combined configuration has an unknown twig");
        cc.twig_of[w] = it->second;
      }
    out.push_back(std::move(cc));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == per_label[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return out;
}

std::vector<TwigSet> realizable_twig_sets(const RadiusLFL& problem, const std::vector<TwigConfiguration>& twigs,
                                          const ReduceOptions& opts) {
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(twigs.size()); ++i) groups[twigs[i].profile.center].push_back(i);
  std::set<TwigSet> found;
  for (const auto& [center, members] : groups) {
    std::map<int, int> bound;
    for (int i : members)
      for (const auto& [l, range] : twigs[i].profile.nbr) bound[l] = std::max(bound[l], range.count);
    std::vector<int> ls;
    std::vector<int> hi;
    double space = 1;
    for (auto [l, m] : bound) {
      ls.push_back(l);
      hi.push_back(m + 1);
      space *= m + 2;
    }
    if (space <= static_cast<double>(opts.ball_enumeration_cap)) {
      std::vector<int> cnt(ls.size(), 0);
      for (;;) {
        std::map<int, int> ball;
        for (std::size_t i = 0; i < ls.size(); ++i) ball[ls[i]] = cnt[i];
        TwigSet X;
        for (int i : members)
          if (twigs[i].profile.admits(ball)) X.push_back(i);
        if (!X.empty()) found.insert(X);
        std::size_t k = 0;
        while (k < cnt.size() && ++cnt[k] > hi[k]) cnt[k++] = 0;
        if (k == cnt.size()) break;
      }
    } else {
      // Every jointly matchable subset (a superset of the realizable ones).
      std::function<void(std::size_t, TwigSet&, std::optional<StarProfile>)> dfs =
          [&](std::size_t from, TwigSet& cur, std::optional<StarProfile> acc) {
            if (!cur.empty()) found.insert(cur);
            for (std::size_t j = from; j < members.size(); ++j) {
              auto next = acc ? intersect_profiles(*acc, twigs[members[j]].profile) : twigs[members[j]].profile;
              if (!next) continue;
              cur.push_back(members[j]);
              dfs(j + 1, cur, next);
              cur.pop_back();
            }
          };
      TwigSet cur;
      dfs(0, cur, std::nullopt);
    }
  }
  (void)problem;
  std::vector<TwigSet> sets{TwigSet{}};
  sets.insert(sets.end(), found.begin(), found.end());
  return sets;
}

ReduceResult reduce_radius(const RadiusLFL& problem, const ReduceOptions& opts) {
  check_reducible(problem);
  const int nout = problem.nout();
  const int r = problem.radius;
  ReduceResult res;
  res.twigs = twig_configurations(problem);
  auto sets = realizable_twig_sets(problem, res.twigs, opts);

  Alphabet outputs, aux;
  std::vector<int> aux_y, aux_twig;
  struct Pending {
    RadiusConfiguration config;  // labels: >= 0 output index, < 0 encodes aux index as -1 - a
    std::string trace;
  };
  std::vector<Pending> pending;
  std::set<std::string> seen;

  auto output_label = [&](int y, const TwigSet& X) {
    std::string name = problem.sigma_out.name(y) + "|" + twig_set_name(X, res.twigs);
    auto f = outputs.find(name);
    if (f) return *f;
    int id = outputs.add(name);
    res.base_output.push_back(y);
    res.twig_sets.push_back(X);
    return id;
  };
  auto aux_label = [&](int y, int twig) {
    std::string name = problem.sigma_out.name(y) + "|" + (twig < 0 ? "*" : res.twigs[twig].ball.name + "+");
    auto f = aux.find(name);
    if (f) return *f;
    aux_y.push_back(y);
    aux_twig.push_back(twig);
    return aux.add(name);
  };

  for (int ci = 0; ci < static_cast<int>(problem.configs.size()); ++ci) {
    if (!problem.prepared(ci).matchable) continue;
    const auto& C = problem.configs[ci];
    ConfigTree ct = config_tree(C);
    const int center_label = node_label(C, C.center, nout);
    for (const auto& X : sets) {
      StarProfile cx;
      if (X.empty()) {
        cx.center = center_label;
        for (int u : ct.children[C.center]) {
          auto& range = cx.nbr[node_label(C, u, nout)];
          range.open = true;
          if (ct.required_up[u]) ++range.count;
        }
      } else {
        if (res.twigs[X[0]].profile.center != center_label) continue;
        auto p = intersect_twig_set(res.twigs, X);
        if (!p) continue;
        cx = *p;
      }
      auto combined = combine_configurations(problem, ci, res.twigs, cx, X);
      int serial = 0;
      for (auto& cc : combined) {
        const auto& K = cc.config;
        ConfigTree kt = config_tree(K);
        std::vector<int> keep(K.size(), -1);
        Pending pd;
        RadiusConfiguration& R = pd.config;
        for (int w = 0; w < K.size(); ++w) {
          if (kt.depth[w] > r - 1) continue;
          keep[w] = R.size();
          R.in.push_back(K.in[w]);
          int lab;
          if (w == K.center)
            lab = output_label(K.out[w], X);
          else if (kt.depth[w] == r - 1)
            lab = -1 - aux_label(K.out[w], cc.twig_of[w]);
          else
            lab = -1 - aux_label(K.out[w], -1);
          R.out.push_back(lab);
        }
        R.center = keep[K.center];
        for (const auto& e : K.edges)
          if (keep[e.u] >= 0 && keep[e.v] >= 0) R.edges.push_back({keep[e.u], keep[e.v], e.required});
        std::string key = configuration_canonical(R);
        if (!seen.insert(key).second) continue;
        R.name = C.name + "/" + twig_set_name(X, res.twigs) + (serial ? "#" + std::to_string(serial) : "");
        ++serial;
        pd.trace = cc.trace;
        pending.push_back(std::move(pd));
        if (pending.size() > opts.cap)
          throw PreconditionError("radius reduction exceeds the cap of " + std::to_string(opts.cap) +
                                  " configurations");
      }
    }
  }

  RadiusLFL& out = res.problem;
  out.sigma_in = problem.sigma_in;
  out.sigma_out = outputs;
  out.aux = aux;
  out.radius = r - 1;
  out.allow_disconnected_required = problem.allow_disconnected_required;
  const int nout2 = outputs.size();
  for (auto& pd : pending) {
    for (auto& l : pd.config.out)
      if (l < 0) l = nout2 + (-1 - l);
    out.configs.push_back(std::move(pd.config));
    res.trace.push_back(std::move(pd.trace));
  }
  for (int o = 0; o < nout2; ++o)
    for (int a = 0; a < aux.size(); ++a) {
      if (res.base_output[o] != aux_y[a]) continue;
      const auto& X = res.twig_sets[o];
      if (aux_twig[a] < 0 || std::binary_search(X.begin(), X.end(), aux_twig[a])) out.order.push_back({o, nout2 + a});
    }
  if (nout2 == 0) throw PreconditionError("radius reduction produced no configurations");
  out.finalize();
  return res;
}

TwigSet ball_twig_set(const TreeInstance& inst, const Labeling& outputs, int v, int nout,
                      const std::vector<TwigConfiguration>& twigs) {
  std::map<int, int> ball;
  for (auto [u, e] : inst.adj[v]) ++ball[inst.node_inputs[u] * nout + outputs[u]];
  const int center = inst.node_inputs[v] * nout + outputs[v];
  TwigSet X;
  for (int i = 0; i < static_cast<int>(twigs.size()); ++i)
    if (twigs[i].profile.center == center && twigs[i].profile.admits(ball)) X.push_back(i);
  return X;
}

Labeling convert_forward_reduce(const TreeInstance& inst, const Labeling& sigma, const RadiusLFL& original,
                                const ReduceResult& reduced) {
  Labeling out(inst.n());
  for (int v = 0; v < inst.n(); ++v) {
    TwigSet X = ball_twig_set(inst, sigma, v, original.nout(), reduced.twigs);
    std::string name = original.sigma_out.name(sigma[v]) + "|" + twig_set_name(X, reduced.twigs);
    auto f = reduced.problem.sigma_out.find(name);
    if (!f) throw ConversionError("node " + inst.ids[v] + " needs the missing label " + name, {});
    out[v] = *f;
  }
  Verdict verdict = verify_radius(inst, out, reduced.problem);
  if (!verdict.valid) throw ConversionError("forward conversion is invalid under the reduced problem", verdict);
  return out;
}

Labeling convert_backward_reduce(const TreeInstance& inst, const Labeling& sigma, const RadiusLFL& original,
                                 const ReduceResult& reduced) {
  Labeling out(inst.n());
  for (int v = 0; v < inst.n(); ++v) out[v] = reduced.base_output.at(sigma[v]);
  Verdict verdict = verify_radius(inst, out, original);
  if (!verdict.valid) throw ConversionError("twig-swap consistency check failed: projected labeling is invalid", verdict);
  return out;
}

}  // namespace lfl
