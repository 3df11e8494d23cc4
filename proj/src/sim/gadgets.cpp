#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "lfl/sim.hpp"
#include "lfl/trees.hpp"

namespace lfl {

namespace {

constexpr int kMaxG = 400;

// bounded[r][m]: partitions of r with every part at most m.
const std::vector<std::vector<std::uint64_t>>& bounded_table() {
  static const auto table = [] {
    std::vector<std::vector<std::uint64_t>> b(kMaxG + 1, std::vector<std::uint64_t>(kMaxG + 1, 0));
    for (int m = 0; m <= kMaxG; ++m) b[0][m] = 1;
    for (int r = 1; r <= kMaxG; ++r)
      for (int m = 1; m <= kMaxG; ++m) b[r][m] = b[r][m - 1] + (m <= r ? b[r - m][m] : 0);
    return b;
  }();
  return table;
}

std::uint64_t bounded(int r, int m) {
  m = std::min(m, r);
  if (r == 0) return 1;
  if (m <= 0) return 0;
  return bounded_table()[r][m];
}

void check_g(int g) {
  if (g < 1 || g > kMaxG) throw PreconditionError("gadget size must lie in [1, 400]");
}

}  // namespace

std::uint64_t partition_count(int g) {
  check_g(g);
  return bounded(g, g);
}

std::vector<int> partition_unrank(int g, std::uint64_t index) {
  check_g(g);
  if (index < 1 || index > partition_count(g)) throw PreconditionError("partition index out of range");
  std::vector<int> parts;
  std::uint64_t skip = index - 1;
  int r = g, cap = g;
  while (r > 0) {
    // first parts tried from largest to smallest
    for (int a = std::min(cap, r); a >= 1; --a) {
      const std::uint64_t with_a = bounded(r - a, a);
      if (skip < with_a) {
        parts.push_back(a);
        r -= a;
        cap = a;
        break;
      }
      skip -= with_a;
    }
  }
  return parts;
}

std::uint64_t partition_rank(const std::vector<int>& parts) {
  int g = 0;
  for (int a : parts) {
    if (a < 1) throw PreconditionError("partition parts must be positive");
    g += a;
  }
  check_g(g);
  if (!std::is_sorted(parts.rbegin(), parts.rend())) throw PreconditionError("partition parts must be descending");
  std::uint64_t rank = 1;
  int r = g, cap = g;
  for (int a : parts) {
    for (int b = std::min(cap, r); b > a; --b) rank += bounded(r - b, b);
    r -= a;
    cap = a;
  }
  return rank;
}

std::vector<std::vector<int>> partitions_of(int g) {
  check_g(g);
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int r, int cap) {
    if (r == 0) {
      out.push_back(cur);
      return;
    }
    for (int a = std::min(r, cap); a >= 1; --a) {
      cur.push_back(a);
      rec(r - a, a);
      cur.pop_back();
    }
  };
  rec(g, g);
  return out;
}

bool gadget_g_valid(double alpha, int g) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("alpha must lie in (0, 1)");
  if (g < 1 || g > kMaxG) return false;
  return std::pow(static_cast<double>(g), 1.0 / alpha - 1.0) < static_cast<double>(partition_count(g));
}

long long gadget_max_length(double alpha, int g) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("alpha must lie in (0, 1)");
  const double v = std::floor(0.5 * std::pow(static_cast<double>(g), 1.0 / alpha - 1.0) + 1e-9);
  if (v > 1e18) return std::numeric_limits<long long>::max();
  return static_cast<long long>(v);
}

GadgetInstance build_gadget_path(int g, int L, int padding, int first_index, double alpha) {
  check_g(g);
  if (L < 1) throw PreconditionError("gadget path needs at least one node");
  if (padding < 0 || padding == 1 || padding == 2)
    throw PreconditionError("padding must be 0 or at least 3 nodes");
  if (first_index < 1 || static_cast<std::uint64_t>(first_index + L - 1) > partition_count(g))
    throw PreconditionError("not enough partitions for the gadget indices");
  GadgetInstance inst;
  inst.alpha = alpha;
  inst.g = g;
  inst.length = L;
  inst.first_index = first_index;
  inst.padding = padding;
  std::vector<std::array<int, 2>> edges;
  int n = L;
  std::vector<int> gadget_of(L, 0);
  for (int i = 0; i < L; ++i) {
    inst.path.push_back(i);
    gadget_of[i] = first_index + i;
    if (i > 0) edges.push_back({i - 1, i});
  }
  for (int i = 0; i < L; ++i) {
    const int idx = first_index + i;
    for (int a : partition_unrank(g, static_cast<std::uint64_t>(idx))) {
      const int hub = n++;
      gadget_of.push_back(idx);
      edges.push_back({i, hub});
      for (int l = 1; l < a; ++l) {
        edges.push_back({hub, n++});
        gadget_of.push_back(idx);
      }
    }
  }
  int prev = L - 1;
  for (int q = 0; q < padding; ++q) {
    edges.push_back({prev, n});
    gadget_of.push_back(0);
    prev = n++;
  }
  inst.tree = TreeInstance::from_edges(n, edges);
  set_uniform_inputs(inst.tree, 0);
  inst.gadget_of = std::move(gadget_of);
  inst.required.assign(n, 0);
  if (first_index == 1 && L >= 2)
    for (int v : inst.path) inst.required[v] = 1;
  return inst;
}

GadgetInstance generate_gadget_instance(double alpha, int g, int L, int padding) {
  if (!gadget_g_valid(alpha, g))
    throw PreconditionError("gadget size " + std::to_string(g) + " is below the threshold for alpha");
  if (L <= 1 || L > gadget_max_length(alpha, g))
    throw PreconditionError("gadget path length " + std::to_string(L) + " is out of range");
  return build_gadget_path(g, L, padding, 1, alpha);
}

namespace {

struct Recognized {
  int g = 0;
  std::uint64_t index = 0;  // 0: no usable gadget
};

Recognized recognize(const TreeInstance& t, int v, double alpha) {
  std::vector<int> parts;
  for (auto [u, e] : t.adj[v]) {
    if (t.degree(u) == 1) {
      parts.push_back(1);
      continue;
    }
    bool star = true;
    for (auto [w, f] : t.adj[u])
      if (w != v && t.degree(w) != 1) star = false;
    if (star) parts.push_back(t.degree(u));
  }
  Recognized r;
  if (parts.empty()) return r;
  int g = 0;
  for (int a : parts) g += a;
  if (g > kMaxG || !gadget_g_valid(alpha, g)) return r;
  std::sort(parts.rbegin(), parts.rend());
  const std::uint64_t idx = partition_rank(parts);
  if (static_cast<long long>(idx) > gadget_max_length(alpha, g)) return r;
  r.g = g;
  r.index = idx;
  return r;
}

}  // namespace

GadgetCheck check_gadget_labeling(const GadgetInstance& inst, const std::vector<int>& outputs) {
  const auto& t = inst.tree;
  if (static_cast<int>(outputs.size()) != t.n()) throw PreconditionError("one output per node is required");
  std::vector<Recognized> rec(t.n());
  for (int v = 0; v < t.n(); ++v) rec[v] = recognize(t, v, inst.alpha);
  GadgetCheck c;
  for (int v = 0; v < t.n(); ++v) {
    bool want = false;
    const auto r = rec[v];
    if (r.index == 1) {
      for (auto [w, e] : t.adj[v])
        if (rec[w].g == r.g && rec[w].index == 2) want = true;
    } else if (r.index >= 2) {
      for (auto [w, e] : t.adj[v])
        if (rec[w].g == r.g && rec[w].index == r.index - 1 && outputs[w] == 1) want = true;
    }
    if (outputs[v] != (want ? 1 : 0) || (outputs[v] != 0 && outputs[v] != 1)) {
      c.valid = false;
      c.violations.push_back(v);
    }
  }
  return c;
}

IndistinguishabilityPair indistinguishability_pair(int n, double alpha) {
  IndistinguishabilityPair out;
  const int g = static_cast<int>(std::floor(std::pow(static_cast<double>(n), alpha) + 1e-9));
  const int L = static_cast<int>(std::floor(std::pow(static_cast<double>(n), 1.0 - alpha) + 1e-9)) / 4;
  if (L < 3) throw PreconditionError("n is too small for a gadget pair");
  if (!gadget_g_valid(alpha, g)) throw PreconditionError("gadget size is below the threshold for alpha");
  if (L > gadget_max_length(alpha, g)) throw PreconditionError("gadget path is too long for alpha");
  const int body = L * (g + 1);
  if (n - body < 3) throw PreconditionError("n leaves no room for padding");
  out.g1 = build_gadget_path(g, L, n - body, 1, alpha);
  out.g2 = build_gadget_path(g, L - 1, n - body + g + 1, 2, alpha);
  out.v1 = out.g1.path.back();
  out.v2 = out.g2.path.back();
  out.radius = L - 2;
  out.views_equal = rooted_canonical(out.g1.tree, out.v1, -1, out.radius) ==
                    rooted_canonical(out.g2.tree, out.v2, -1, out.radius);
  out.next_views_differ = rooted_canonical(out.g1.tree, out.v1, -1, out.radius + 1) !=
                          rooted_canonical(out.g2.tree, out.v2, -1, out.radius + 1);
  return out;
}

}  // namespace lfl
