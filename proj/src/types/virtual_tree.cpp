#include <algorithm>
#include <limits>
#include <map>

#include "lfl/assign.hpp"
#include "lfl/types.hpp"

namespace lfl {

std::uint64_t virtual_tree_size_bound(const NodeEdgeLFL& p) {
  const auto cap = std::numeric_limits<std::uint64_t>::max();
  auto mul = [&](std::uint64_t a, std::uint64_t b) { return (b != 0 && a > cap / b) ? cap : a * b; };
  std::uint64_t r = mul(static_cast<std::uint64_t>(p.max_config_size()) + 1,
                        static_cast<std::uint64_t>(p.nin()) * static_cast<std::uint64_t>(p.nin()));
  for (int i = 0; i < p.nout(); ++i) r = mul(r, 2);
  return r;
}

VirtualTree shrink_virtual_tree(const VirtualTree& vt, int s) {
  VirtualTree out = vt;
  out.incoming.clear();
  std::vector<Incoming> sorted = vt.incoming;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    std::size_t keep = std::min<std::size_t>(j - i, static_cast<std::size_t>(s) + 1);
    for (std::size_t k = 0; k < keep; ++k) out.incoming.push_back(sorted[i]);
    i = j;
  }
  return out;
}

namespace {

// Adjacent labels b admissible for an element: some far label of its type pairs with b on the edge.
Bits adjacent_options(const Incoming& in, const NodeEdgeLFL& p) {
  Bits b(p.nout());
  for (int y = 0; y < p.nout(); ++y)
    for (int a : in.type.members())
      if (p.edge_ok(p.pair(in.x_far, a), p.pair(in.x_adj, y))) {
        b.set(y);
        break;
      }
  return b;
}

struct Grouped {
  Incoming rep;
  Bits options;
  long long count = 0;
  std::vector<std::size_t> members;
};

std::vector<Grouped> group_incoming(const VirtualTree& vt, const NodeEdgeLFL& p) {
  std::map<Incoming, std::size_t> idx;
  std::vector<Grouped> out;
  for (std::size_t i = 0; i < vt.incoming.size(); ++i) {
    auto [it, fresh] = idx.emplace(vt.incoming[i], out.size());
    if (fresh) out.push_back({vt.incoming[i], adjacent_options(vt.incoming[i], p), 0, {}});
    out[it->second].count++;
    out[it->second].members.push_back(i);
  }
  return out;
}

std::optional<VirtualTreeWitness> witness_grouped(const VirtualTree& vt, const std::vector<Grouped>& groups,
                                                  const NodeEdgeLFL& p, const std::vector<int>& pole_labels) {
  std::vector<int> pole_pairs;
  if (vt.poles >= 1) pole_pairs.push_back(p.pair(vt.x, pole_labels.at(0)));
  if (vt.poles >= 2) pole_pairs.push_back(p.pair(vt.x_right, pole_labels.at(1)));
  for (int c = 0; c < static_cast<int>(p.node_configs.size()); ++c) {
    const auto& cfg = p.node_configs[c];
    std::vector<Bucket> buckets;
    for (const auto& e : cfg) buckets.push_back({e.count, e.star});
    bool ok = true;
    for (int q : pole_pairs) {
      auto it = std::find_if(cfg.begin(), cfg.end(), [&](const NodeConfigEntry& e) { return e.pair == q; });
      if (it == cfg.end()) {
        ok = false;
        break;
      }
      auto& b = buckets[it - cfg.begin()];
      if (b.req > 0)
        --b.req;
      else if (!b.star)
        ok = false;
    }
    if (!ok) continue;
    std::vector<ItemGroup> items;
    for (const auto& g : groups) {
      ItemGroup ig;
      ig.count = g.count;
      for (int k = 0; k < static_cast<int>(cfg.size()); ++k) {
        int q = cfg[k].pair;
        if (p.pair_in(q) == g.rep.x_adj && g.options.test(p.pair_out(q))) ig.allowed.push_back(k);
      }
      if (ig.allowed.empty()) ok = false;
      items.push_back(std::move(ig));
    }
    if (!ok) continue;
    auto placed = assign_buckets(buckets, items);
    if (!placed) continue;
    VirtualTreeWitness w;
    w.config = c;
    w.labels.resize(vt.incoming.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
      std::size_t next = 0;
      for (auto [bucket, amount] : (*placed)[g]) {
        int b = p.pair_out(cfg[bucket].pair);
        int a = -1;
        for (int cand : groups[g].rep.type.members())
          if (p.edge_ok(p.pair(groups[g].rep.x_far, cand), p.pair(groups[g].rep.x_adj, b))) {
            a = cand;
            break;
          }
        for (long long k = 0; k < amount; ++k) w.labels[groups[g].members[next++]] = {a, b};
      }
    }
    return w;
  }
  return std::nullopt;
}

}  // namespace

std::optional<VirtualTreeWitness> virtual_tree_witness(const VirtualTree& vt, const NodeEdgeLFL& p,
                                                       const std::vector<int>& pole_labels) {
  return witness_grouped(vt, group_incoming(vt, p), p, pole_labels);
}

Bits virtual_tree_type(const VirtualTree& vt0, const NodeEdgeLFL& p) {
  VirtualTree vt = shrink_virtual_tree(vt0, p.max_config_size());
  auto groups = group_incoming(vt, p);
  const int k = p.nout();
  if (vt.poles == 0) {
    Bits b(1);
    if (witness_grouped(vt, groups, p, {})) b.set(0);
    return b;
  }
  if (vt.poles == 1) {
    Bits t(k);
    for (int y = 0; y < k; ++y)
      if (witness_grouped(vt, groups, p, {y})) t.set(y);
    return t;
  }
  Bits t(k * k);
  for (int yl = 0; yl < k; ++yl)
    for (int yr = 0; yr < k; ++yr)
      if (witness_grouped(vt, groups, p, {yl, yr})) t.set(yl * k + yr);
  return t;
}

bool virtual_tree_good(const VirtualTree& vt, const NodeEdgeLFL& p) {
  VirtualTree z = vt;
  z.poles = 0;
  return virtual_tree_type(z, p).test(0);
}

Bits subtree_type(const TreeInstance& t, int root, const std::vector<int>& boundary, const NodeEdgeLFL& p) {
  if (boundary.size() > 2) throw PreconditionError("at most two boundary half-edges");
  if (t.half_inputs.size() != 2 * static_cast<std::size_t>(t.m()))
    throw PreconditionError("instance lacks half-edge inputs");
  std::vector<char> cut(t.m(), 0);
  for (int h : boundary) {
    if (h < 0 || h >= 2 * t.m() || t.half_node(h) != root)
      throw PreconditionError("boundary half-edges must sit at the root");
    cut[h / 2] = 1;
  }
  // Iterative post-order over the component of root.
  std::vector<int> order, parent_edge(t.n(), -1);
  std::vector<char> seen(t.n(), 0);
  std::vector<int> stack{root};
  seen[root] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (auto [w, e] : t.adj[v]) {
      if (cut[e] || seen[w]) continue;
      seen[w] = 1;
      parent_edge[w] = e;
      stack.push_back(w);
    }
  }
  std::vector<Bits> type(t.n());
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    VirtualTree vt;
    for (auto [w, e] : t.adj[v]) {
      if (cut[e] || e == parent_edge[v]) continue;
      vt.incoming.push_back({t.half_inputs[t.half_at(e, w)], t.half_inputs[t.half_at(e, v)], type[w]});
    }
    if (v == root) {
      vt.poles = static_cast<int>(boundary.size());
      if (vt.poles >= 1) vt.x = t.half_inputs[boundary[0]];
      if (vt.poles >= 2) vt.x_right = t.half_inputs[boundary[1]];
    } else {
      vt.poles = 1;
      vt.x = t.half_inputs[t.half_at(parent_edge[v], v)];
    }
    type[v] = virtual_tree_type(vt, p);
  }
  return type[root];
}

std::string type_to_string(const Bits& t, const NodeEdgeLFL& p) {
  std::string s = "{";
  bool first = true;
  const int k = p.nout();
  for (int m : t.members()) {
    if (!first) s += ",";
    first = false;
    if (t.width() == k)
      s += p.sigma_out.name(m);
    else
      s += "(" + p.sigma_out.name(m / k) + "," + p.sigma_out.name(m % k) + ")";
  }
  return s + "}";
}

}  // namespace lfl
