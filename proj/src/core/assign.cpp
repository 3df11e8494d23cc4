#include "lfl/assign.hpp"

#include <algorithm>
#include <queue>

namespace lfl {
namespace {

class Dinic {
 public:
  explicit Dinic(int n) : g_(n), level_(n), it_(n) {}

  int add_edge(int u, int v, long long cap) {
    g_[u].push_back({v, static_cast<int>(g_[v].size()), cap});
    g_[v].push_back({u, static_cast<int>(g_[u].size()) - 1, 0});
    return static_cast<int>(g_[u].size()) - 1;
  }

  long long flow_on(int u, int idx) const {
    const Edge& e = g_[u][idx];
    return g_[e.to][e.rev].cap;
  }

  long long max_flow(int s, int t) {
    long long total = 0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (long long f = dfs(s, t, kInf)) total += f;
    }
    return total;
  }

 private:
  static constexpr long long kInf = (1LL << 62);
  struct Edge {
    int to;
    int rev;
    long long cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const Edge& e : g_[u]) {
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  long long dfs(int u, int t, long long f) {
    if (u == t) return f;
    for (int& i = it_[u]; i < static_cast<int>(g_[u].size()); ++i) {
      Edge& e = g_[u][i];
      if (e.cap > 0 && level_[e.to] == level_[u] + 1) {
        long long d = dfs(e.to, t, std::min(f, e.cap));
        if (d > 0) {
          e.cap -= d;
          g_[e.to][e.rev].cap += d;
          return d;
        }
      }
    }
    return 0;
  }

  std::vector<std::vector<Edge>> g_;
  std::vector<int> level_;
  std::vector<int> it_;
};

}  // namespace

std::optional<std::vector<std::vector<std::pair<int, long long>>>> assign_buckets(
    const std::vector<Bucket>& buckets, const std::vector<ItemGroup>& groups) {
  long long items = 0;
  long long required = 0;
  for (const auto& g : groups) items += g.count;
  for (const auto& b : buckets) required += b.req;
  if (required > items) return std::nullopt;
  long long fixed_capacity = 0;
  bool any_star = false;
  for (const auto& b : buckets) {
    if (b.star) any_star = true;
    else fixed_capacity += b.req;
  }
  if (!any_star && fixed_capacity != items) return std::nullopt;

  const int ng = static_cast<int>(groups.size());
  const int nb = static_cast<int>(buckets.size());
  const int S = 0, T = 1, SS = 2, TT = 3, base_g = 4, base_b = 4 + ng;
  Dinic d(base_b + nb);
  const long long inf = items + required + 1;
  std::vector<long long> excess(base_b + nb, 0);
  std::vector<std::vector<std::pair<int, int>>> handles(ng);

  for (int gi = 0; gi < ng; ++gi) {
    if (groups[gi].count == 0) continue;
    excess[base_g + gi] += groups[gi].count;
    excess[S] -= groups[gi].count;
    for (int b : groups[gi].allowed) {
      int h = d.add_edge(base_g + gi, base_b + b, groups[gi].count);
      handles[gi].push_back({b, h});
    }
  }
  for (int bi = 0; bi < nb; ++bi) {
    excess[T] += buckets[bi].req;
    excess[base_b + bi] -= buckets[bi].req;
    if (buckets[bi].star) d.add_edge(base_b + bi, T, inf);
  }
  d.add_edge(T, S, inf);
  long long need = 0;
  for (int v = 0; v < base_b + nb; ++v) {
    if (excess[v] > 0) {
      d.add_edge(SS, v, excess[v]);
      need += excess[v];
    } else if (excess[v] < 0) {
      d.add_edge(v, TT, -excess[v]);
    }
  }
  if (d.max_flow(SS, TT) != need) return std::nullopt;

  std::vector<std::vector<std::pair<int, long long>>> out(ng);
  for (int gi = 0; gi < ng; ++gi)
    for (auto [b, h] : handles[gi]) {
      long long f = d.flow_on(base_g + gi, h);
      if (f > 0) out[gi].push_back({b, f});
    }
  return out;
}

bool buckets_feasible(const std::vector<Bucket>& buckets, const std::vector<ItemGroup>& groups) {
  return assign_buckets(buckets, groups).has_value();
}

}  // namespace lfl
