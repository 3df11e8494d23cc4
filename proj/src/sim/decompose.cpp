#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <string>

#include "lfl/sim.hpp"

namespace lfl {

long long RCDecomposition::rounds() const {
  long long r = 0;
  for (const auto& a : accounting) r += a.rounds;
  return r;
}

int log_star(long long n) {
  int s = 0;
  double x = static_cast<double>(n);
  while (x > 1.0) {
    x = std::log2(x);
    ++s;
  }
  return s;
}

int poly_gamma(int n, int ell, int k) {
  if (k < 1) throw PreconditionError("poly decomposition needs k >= 1");
  if (k == 1) return std::max(1, n);
  const double g = std::pow(static_cast<double>(n), 1.0 / k) * std::pow(ell / 2.0, 1.0 - 1.0 / k);
  return std::max(1, static_cast<int>(std::ceil(g - 1e-9)));
}

namespace {

struct Peeler {
  const TreeInstance& t;
  std::vector<char> alive;
  std::vector<int> deg;
  int remaining;

  explicit Peeler(const TreeInstance& tree) : t(tree), alive(tree.n(), 1), deg(tree.n()), remaining(tree.n()) {
    for (int v = 0; v < t.n(); ++v) deg[v] = t.degree(v);
  }

  void remove(const std::vector<int>& nodes) {
    for (int v : nodes) alive[v] = 0;
    for (int v : nodes)
      for (auto [w, e] : t.adj[v])
        if (alive[w]) --deg[w];
    remaining -= static_cast<int>(nodes.size());
  }

  int alive_neighbor(int v) const {
    for (auto [w, e] : t.adj[v])
      if (alive[w]) return w;
    return -1;
  }

  // Nodes of degree at most one; on an isolated edge only the lower id goes.
  std::vector<int> rake_candidates() const {
    std::vector<int> out;
    for (int v = 0; v < t.n(); ++v) {
      if (!alive[v] || deg[v] > 1) continue;
      if (deg[v] == 1) {
        int w = alive_neighbor(v);
        if (deg[w] == 1 && w < v) continue;
      }
      out.push_back(v);
    }
    return out;
  }

  // Maximal chains of alive degree-2 nodes, in walk order.
  std::vector<std::vector<int>> chains() const {
    std::vector<char> seen(t.n(), 0);
    std::vector<std::vector<int>> out;
    for (int v = 0; v < t.n(); ++v) {
      if (!alive[v] || deg[v] != 2 || seen[v]) continue;
      // walk to one end
      int start = v, prev = -1;
      while (true) {
        int next = -1;
        for (auto [w, e] : t.adj[start])
          if (alive[w] && w != prev && deg[w] == 2) next = w;
        if (next < 0 || next == v) break;
        prev = start;
        start = next;
      }
      std::vector<int> chain;
      int cur = start;
      prev = -1;
      while (cur >= 0 && !seen[cur]) {
        seen[cur] = 1;
        chain.push_back(cur);
        int next = -1;
        for (auto [w, e] : t.adj[cur])
          if (alive[w] && w != prev && deg[w] == 2 && !seen[w]) next = w;
        prev = cur;
        cur = next;
      }
      out.push_back(std::move(chain));
    }
    return out;
  }
};

}  // namespace

static RCDecomposition rc_decompose_impl(const TreeInstance& t, int gamma, int ell, int k, bool until_empty) {
  if (gamma < 1) throw PreconditionError("gamma must be at least 1");
  if (ell < 1) throw PreconditionError("ell must be at least 1");
  RCDecomposition d;
  d.gamma = gamma;
  d.ell = ell;
  d.layer.assign(t.n(), -1);
  d.sublayer.assign(t.n(), 0);
  d.path_of.assign(t.n(), -1);
  Peeler pl(t);
  const long long compress_cost = 2LL * ell + log_star(t.n());
  for (int i = 0; pl.remaining > 0; ++i) {
    if (!until_empty && i >= k) {
      std::string msg = "residue: " + std::to_string(pl.remaining) + " nodes left after " + std::to_string(k) +
                        " rake layers (gamma " + std::to_string(gamma) + ", ell " + std::to_string(ell) + ")";
      throw PreconditionError(msg);
    }
    if (i > 0) {
      int removed = 0;
      for (auto& chain : pl.chains()) {
        const int m = static_cast<int>(chain.size());
        if (m < ell) continue;
        const int j = (m + 1) / (2 * ell + 1) + ((m + 1) % (2 * ell + 1) ? 1 : 0);
        // j segments and j - 1 separators; segment lengths differ by at most one
        const int seg_total = m - (j - 1);
        std::vector<int> removed_nodes;
        int pos = 0;
        for (int s = 0; s < j; ++s) {
          const int len = seg_total / j + (s < seg_total % j ? 1 : 0);
          std::vector<int> seg(chain.begin() + pos, chain.begin() + pos + len);
          pos += len + 1;
          for (int v : seg) {
            d.layer[v] = 2 * i - 1;
            d.path_of[v] = static_cast<int>(d.paths.size());
            removed_nodes.push_back(v);
          }
          d.paths.push_back(std::move(seg));
        }
        removed += static_cast<int>(removed_nodes.size());
        pl.remove(removed_nodes);
      }
      d.accounting.push_back({"compress " + std::to_string(i), compress_cost});
      d.log.push_back("C" + std::to_string(i) + ": " + std::to_string(removed) + " nodes");
    }
    int raked = 0, sub = 0;
    for (int j = 1; j <= gamma && pl.remaining > 0; ++j) {
      auto cand = pl.rake_candidates();
      if (cand.empty()) break;
      for (int v : cand) {
        d.layer[v] = 2 * i;
        d.sublayer[v] = j;
      }
      raked += static_cast<int>(cand.size());
      sub = j;
      pl.remove(cand);
    }
    d.accounting.push_back({"rake " + std::to_string(i), gamma});
    d.log.push_back("R" + std::to_string(i) + ": " + std::to_string(raked) + " nodes in " + std::to_string(sub) +
                    " sublayers");
    d.k = i + 1;
  }
  return d;
}

RCDecomposition rc_decompose(const TreeInstance& t, int gamma, int ell, int k) {
  return rc_decompose_impl(t, gamma, ell, k, false);
}

RCDecomposition rc_decompose_poly(const TreeInstance& t, int ell, int k) {
  return rc_decompose(t, poly_gamma(t.n(), ell, k), ell, k);
}

RCDecomposition rc_decompose_log(const TreeInstance& t, int ell, int gamma) {
  return rc_decompose_impl(t, gamma, ell, 0, true);
}

namespace {

int component_diameter(const TreeInstance& t, const std::vector<int>& comp, const std::vector<char>& in) {
  auto bfs = [&](int s, int* far) {
    std::map<int, int> dist;
    std::queue<int> q;
    dist[s] = 0;
    q.push(s);
    int best = s;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      if (dist[v] > dist[best]) best = v;
      for (auto [w, e] : t.adj[v])
        if (in[w] && !dist.count(w)) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
    }
    *far = best;
    return dist[best];
  };
  int a = 0, b = 0;
  bfs(comp.front(), &a);
  return bfs(a, &b);
}

}  // namespace

DecompositionCheck validate_decomposition(const TreeInstance& t, const RCDecomposition& d) {
  DecompositionCheck c;
  auto fail = [&](std::string s) {
    c.ok = false;
    c.problems.push_back(std::move(s));
  };
  if (static_cast<int>(d.layer.size()) != t.n()) {
    fail("layer vector has the wrong size");
    return c;
  }
  for (int v = 0; v < t.n(); ++v) {
    if (d.layer[v] < 0) {
      fail("node " + std::to_string(v) + " has no layer");
      continue;
    }
    if (d.layer[v] > 2 * (d.k - 1)) fail("node " + std::to_string(v) + " is above the last rake layer");
    if (d.is_rake(v)) {
      int higher = 0;
      for (auto [w, e] : t.adj[v])
        if (d.layer[w] >= 0 && d.key(w) >= d.key(v)) ++higher;
      if (higher > 1) fail("rake node " + std::to_string(v) + " has " + std::to_string(higher) + " higher neighbors");
    } else if (d.path_of[v] < 0) {
      fail("compress node " + std::to_string(v) + " is on no path");
    }
  }
  for (std::size_t pi = 0; pi < d.paths.size(); ++pi) {
    const auto& path = d.paths[pi];
    const int len = static_cast<int>(path.size());
    const std::string name = "path " + std::to_string(pi);
    if (len < d.ell || len > 2 * d.ell) fail(name + " has length " + std::to_string(len));
    for (int j = 0; j < len; ++j) {
      const int v = path[j];
      int higher = 0, same = 0;
      for (auto [w, e] : t.adj[v]) {
        if (d.path_of[w] == static_cast<int>(pi)) {
          ++same;
          const bool consecutive = (j > 0 && w == path[j - 1]) || (j + 1 < len && w == path[j + 1]);
          if (!consecutive) fail(name + " is not a path");
        } else if (d.key(w) > d.key(v)) {
          ++higher;
        } else if (d.key(w) == d.key(v)) {
          fail(name + " touches another path of its layer");
        }
      }
      const int want = len == 1 ? 2 : (j == 0 || j == len - 1 ? 1 : 0);
      if (higher != want) fail(name + " node " + std::to_string(v) + " has " + std::to_string(higher) + " higher neighbors");
      if (same != std::min(len - 1, (j > 0) + (j + 1 < len))) fail(name + " is not a path");
    }
  }
  for (int i = 0; i < d.k; ++i) {
    std::vector<char> in(t.n(), 0);
    for (int v = 0; v < t.n(); ++v) in[v] = d.layer[v] == 2 * i;
    std::vector<char> done(t.n(), 0);
    for (int v = 0; v < t.n(); ++v) {
      if (!in[v] || done[v]) continue;
      std::vector<int> comp{v};
      done[v] = 1;
      for (std::size_t q = 0; q < comp.size(); ++q)
        for (auto [w, e] : t.adj[comp[q]])
          if (in[w] && !done[w]) {
            done[w] = 1;
            comp.push_back(w);
          }
      const int diam = component_diameter(t, comp, in);
      c.max_rake_diameter = std::max(c.max_rake_diameter, diam);
      if (diam > 2 * d.gamma) fail("rake layer " + std::to_string(i) + " component diameter " + std::to_string(diam));
    }
  }
  return c;
}

}  // namespace lfl
