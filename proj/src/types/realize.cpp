#include <array>

#include "lfl/types.hpp"

namespace lfl {

namespace {

struct Builder {
  Builder(const TypeRegistry& r, std::size_t cap) : reg(r), max_nodes(cap) {}
  const TypeRegistry& reg;
  std::size_t max_nodes;
  int n = 0;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 2>> inputs;
  std::vector<RealizedPath> paths;

  int node() {
    if (static_cast<std::size_t>(++n) > max_nodes) throw PreconditionError("realization exceeds the node cap");
    return n - 1;
  }
  // Half 2e sits at u, 2e+1 at v.
  int edge(int u, int v, int xu, int xv) {
    edges.push_back({u, v});
    inputs.push_back({xu, xv});
    return static_cast<int>(edges.size()) - 1;
  }
  void children(int v, const std::vector<std::pair<int, int>>& kids) {
    for (auto [tid, x_adj] : kids) hang(tid, v, x_adj);
  }
  std::vector<int> path_nodes(const std::vector<PathNodeRep>& path) {
    std::vector<int> u;
    for (std::size_t j = 0; j < path.size(); ++j) {
      u.push_back(node());
      if (j > 0) edge(u[j - 1], u[j], path[j - 1].x_right, path[j].x_left);
    }
    for (std::size_t j = 0; j < path.size(); ++j) children(u[j], path[j].children);
    return u;
  }
  // Realizes tuple `tid` below `parent`; returns the special half-edge.
  int hang(int tid, int parent, int x_parent) {
    const auto& tt = reg.tuple(tid);
    const auto& prov = reg.provenance(tid);
    switch (prov.kind) {
      case Provenance::Kind::Seed:
      case Provenance::Kind::VirtualTree: {
        int v = node();
        int e = edge(v, parent, tt.x, x_parent);
        children(v, prov.children);
        return 2 * e;
      }
      case Provenance::Kind::ClassLeft:
      case Provenance::Kind::ClassRight: {
        if (prov.path.empty()) throw PreconditionError("class provenance without a path");
        auto u = path_nodes(prov.path);
        const bool left = prov.kind == Provenance::Kind::ClassLeft;
        int far_end = node();
        int es, et;
        if (left) {
          es = 2 * edge(u.front(), parent, prov.path.front().x_left, x_parent);
          et = 2 * edge(u.back(), far_end, prov.path.back().x_right, 0);
        } else {
          es = 2 * edge(u.front(), far_end, prov.path.front().x_left, 0);
          et = 2 * edge(u.back(), parent, prov.path.back().x_right, x_parent);
        }
        paths.push_back({es, et, prov.class_x, prov.class_y});
        return left ? es : et;
      }
    }
    return -1;
  }
  Realization finish(int special) {
    Realization r;
    r.tree = TreeInstance::from_edges(n, edges);
    r.tree.half_inputs.resize(2 * edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      r.tree.half_inputs[2 * e] = inputs[e][0];
      r.tree.half_inputs[2 * e + 1] = inputs[e][1];
    }
    r.special_half = special;
    r.paths = std::move(paths);
    return r;
  }
};

}  // namespace

Realization minimal_realization(int tuple, const TypeRegistry& registry, std::size_t max_nodes) {
  if (tuple < 0 || tuple >= registry.size()) throw NotFound("tuple not in registry");
  Builder b(registry, max_nodes);
  int parent = b.node();
  int special = b.hang(tuple, parent, 0);
  return b.finish(special);
}

Realization realize_invalid(const InvalidWitness& w, const TypeRegistry& registry, std::size_t max_nodes) {
  Builder b(registry, max_nodes);
  int v = b.node();
  int special = -1;
  if (w.poles == 1) special = 2 * b.edge(v, b.node(), w.x, 0);
  b.children(v, w.children);
  return b.finish(special);
}

}  // namespace lfl
