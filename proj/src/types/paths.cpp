#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "lfl/types.hpp"

namespace lfl {

NodeBehavior path_type_step(const NodeBehavior& prefix, const NodeBehavior& next, const NodeEdgeLFL& p) {
  const int k = p.nout();
  // reach[yt]: right labels of `next` reachable after the prefix ends in yt.
  std::vector<Bits> reach(k, Bits(k));
  for (int yl = 0; yl < k; ++yl) {
    Bits row(k);
    bool any = false;
    for (int yr = 0; yr < k; ++yr)
      if (next.type.test(yl * k + yr)) {
        row.set(yr);
        any = true;
      }
    if (!any) continue;
    for (int yt = 0; yt < k; ++yt)
      if (p.edge_ok(p.pair(prefix.x_right, yt), p.pair(next.x_left, yl))) reach[yt] |= row;
  }
  NodeBehavior out{Bits(k * k), prefix.x_left, next.x_right};
  for (int ys = 0; ys < k; ++ys) {
    Bits row(k);
    for (int yt = 0; yt < k; ++yt)
      if (prefix.type.test(ys * k + yt)) row |= reach[yt];
    for (int yr : row.members()) out.type.set(ys * k + yr);
  }
  return out;
}

NodeBehavior compress_path_type(const std::vector<NodeBehavior>& path, const NodeEdgeLFL& p) {
  if (path.empty()) throw PreconditionError("compress path must be non-empty");
  NodeBehavior cur = path[0];
  for (std::size_t i = 1; i < path.size(); ++i) cur = path_type_step(cur, path[i], p);
  return cur;
}

NodeBehavior compress_path_type_suffix(const std::vector<NodeBehavior>& path, std::size_t from, const NodeEdgeLFL& p) {
  if (from >= path.size()) throw PreconditionError("suffix must be non-empty");
  NodeBehavior cur = path.back();
  for (std::size_t i = path.size() - 1; i-- > from;) cur = path_type_step(path[i], cur, p);
  return cur;
}

std::size_t count_path_states(const std::vector<NodeBehavior>& behaviors, const NodeEdgeLFL& p, std::size_t cap) {
  std::unordered_set<NodeBehavior, NodeBehaviorHash> seen(behaviors.begin(), behaviors.end());
  std::vector<NodeBehavior> frontier(seen.begin(), seen.end());
  std::sort(frontier.begin(), frontier.end());
  while (!frontier.empty()) {
    std::vector<NodeBehavior> next;
    for (const auto& s : frontier)
      for (const auto& b : behaviors) {
        auto t = path_type_step(s, b, p);
        if (seen.insert(t).second) {
          if (seen.size() > cap) throw PreconditionError("path automaton exceeds the state cap");
          next.push_back(std::move(t));
        }
      }
    frontier = std::move(next);
  }
  return seen.size();
}

std::vector<NodeBehavior> reachable_path_states(const std::vector<NodeBehavior>& behaviors, int lo, int hi,
                                                const NodeEdgeLFL& p) {
  std::set<NodeBehavior> layer(behaviors.begin(), behaviors.end());
  std::set<NodeBehavior> out;
  std::map<std::set<NodeBehavior>, int> first_len;
  std::vector<const std::set<NodeBehavior>*> by_len{nullptr};
  for (int len = 1; len <= hi; ++len) {
    auto [it, fresh] = first_len.emplace(layer, len);
    if (!fresh) {
      // Layers are periodic from here on.
      const int start = it->second, period = len - start;
      for (int m = std::max(len, lo), c = 0; m <= hi && c < period; ++m, ++c) {
        const auto& l = *by_len[start + (m - len) % period];
        out.insert(l.begin(), l.end());
      }
      break;
    }
    by_len.push_back(&it->first);
    if (len >= lo) out.insert(layer.begin(), layer.end());
    std::set<NodeBehavior> next;
    for (const auto& s : layer)
      for (const auto& b : behaviors) next.insert(path_type_step(s, b, p));
    layer = std::move(next);
  }
  return {out.begin(), out.end()};
}

std::optional<std::pair<int, int>> find_state_loop(const std::vector<NodeBehavior>& path, const NodeEdgeLFL& p) {
  std::map<NodeBehavior, int> first;
  if (path.empty()) return std::nullopt;
  NodeBehavior cur = path[0];
  first.emplace(cur, 0);
  for (int i = 1; i < static_cast<int>(path.size()); ++i) {
    cur = path_type_step(cur, path[i], p);
    auto [it, fresh] = first.emplace(cur, i);
    if (!fresh) return std::make_pair(it->second, i);
  }
  return std::nullopt;
}

std::vector<NodeBehavior> pump_virtual_path(const std::vector<NodeBehavior>& path, int target, const NodeEdgeLFL& p,
                                            std::vector<int>* index) {
  const int L = static_cast<int>(path.size());
  std::vector<int> idx(L);
  for (int i = 0; i < L; ++i) idx[i] = i;
  if (L < target) {
    auto loop = find_state_loop(path, p);
    if (!loop) throw std::logic_error("pumping needs a repeated prefix state; path shorter than the state count");
    auto [i, j] = *loop;
    const int l = j - i;
    const int reps = (target - L + l - 1) / l;
    std::vector<int> out(idx.begin(), idx.begin() + j + 1);
    for (int r = 0; r < reps; ++r)
      for (int q = i + 1; q <= j; ++q) out.push_back(q);
    out.insert(out.end(), idx.begin() + j + 1, idx.end());
    idx = std::move(out);
  }
  std::vector<NodeBehavior> res;
  res.reserve(idx.size());
  for (int q : idx) res.push_back(path[q]);
  if (index) *index = std::move(idx);
  return res;
}

}  // namespace lfl
