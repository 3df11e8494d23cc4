#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lfl/bits.hpp"
#include "lfl/core.hpp"

namespace lfl {

// ---------------------------------------------------------------------------
// Virtual trees

struct Incoming {
  int x_far = 0;
  int x_adj = 0;
  Bits type;  // width |sigma_out|
  bool operator==(const Incoming& o) const { return x_far == o.x_far && x_adj == o.x_adj && type == o.type; }
  bool operator<(const Incoming& o) const {
    if (x_far != o.x_far) return x_far < o.x_far;
    if (x_adj != o.x_adj) return x_adj < o.x_adj;
    return type < o.type;
  }
};

struct VirtualTree {
  int poles = 1;  // 0, 1 or 2
  std::vector<Incoming> incoming;
  int x = 0;        // pole input; the left pole with two poles
  int x_right = 0;  // right pole input with two poles
};

// (s+1) * |sigma_in|^2 * 2^|sigma_out|, saturating.
std::uint64_t virtual_tree_size_bound(const NodeEdgeLFL& p);
VirtualTree shrink_virtual_tree(const VirtualTree& vt, int s);

// One pole: width |sigma_out|. Two poles: width |sigma_out|^2, bit yl * |sigma_out| + yr.
Bits virtual_tree_type(const VirtualTree& vt, const NodeEdgeLFL& p);
bool virtual_tree_good(const VirtualTree& vt, const NodeEdgeLFL& p);

struct VirtualTreeWitness {
  int config = 0;
  std::vector<std::pair<int, int>> labels;  // per incoming element: (far label a, adjacent label b)
};
// Assignment realizing the given pole labels (one per pole), or absent.
std::optional<VirtualTreeWitness> virtual_tree_witness(const VirtualTree& vt, const NodeEdgeLFL& p,
                                                       const std::vector<int>& pole_labels);

// Exact type of the part of `t` hanging below `root` behind the given boundary half-edges (all at root).
Bits subtree_type(const TreeInstance& t, int root, const std::vector<int>& boundary_halves, const NodeEdgeLFL& p);

// ---------------------------------------------------------------------------
// Paths

// Two-pole type with its pole inputs; also the state of the path automaton.
struct NodeBehavior {
  Bits type;  // width |sigma_out|^2
  int x_left = 0;
  int x_right = 0;
  bool operator==(const NodeBehavior& o) const {
    return x_left == o.x_left && x_right == o.x_right && type == o.type;
  }
  bool operator<(const NodeBehavior& o) const {
    if (x_left != o.x_left) return x_left < o.x_left;
    if (x_right != o.x_right) return x_right < o.x_right;
    return type < o.type;
  }
};
struct NodeBehaviorHash {
  std::size_t operator()(const NodeBehavior& b) const {
    return hash_combine(b.type.hash(), static_cast<std::size_t>(b.x_left) * 131 + b.x_right);
  }
};

NodeBehavior path_type_step(const NodeBehavior& prefix, const NodeBehavior& next, const NodeEdgeLFL& p);
NodeBehavior compress_path_type(const std::vector<NodeBehavior>& path, const NodeEdgeLFL& p);
// Suffix fold: type of path[from..] computed right to left.
NodeBehavior compress_path_type_suffix(const std::vector<NodeBehavior>& path, std::size_t from, const NodeEdgeLFL& p);

// Number of distinct prefix states over all non-empty behavior sequences.
std::size_t count_path_states(const std::vector<NodeBehavior>& behaviors, const NodeEdgeLFL& p,
                              std::size_t cap = 1000000);
// Distinct prefix states of sequences whose length lies in [lo, hi].
std::vector<NodeBehavior> reachable_path_states(const std::vector<NodeBehavior>& behaviors, int lo, int hi,
                                                const NodeEdgeLFL& p);

// First (i, j), i < j, with equal prefix states after positions i and j; absent if none.
std::optional<std::pair<int, int>> find_state_loop(const std::vector<NodeBehavior>& path, const NodeEdgeLFL& p);
// Repeats the first state loop so that the length reaches at least `target`. With `index`
// set, receives for each output position the input position it copies.
std::vector<NodeBehavior> pump_virtual_path(const std::vector<NodeBehavior>& path, int target, const NodeEdgeLFL& p,
                                            std::vector<int>* index = nullptr);

// ---------------------------------------------------------------------------
// Registry and the Compute Types engine

struct TypeTuple {
  Bits type;
  int x = 0;
  bool operator==(const TypeTuple& o) const { return x == o.x && type == o.type; }
  bool operator<(const TypeTuple& o) const { return x != o.x ? x < o.x : type < o.type; }
};

struct PathNodeRep {
  std::vector<std::pair<int, int>> children;  // (tuple id, x_adj)
  int x_left = 0;
  int x_right = 0;
};

struct Provenance {
  enum class Kind { Seed, VirtualTree, ClassLeft, ClassRight };
  Kind kind = Kind::Seed;
  int iteration = 0;
  std::vector<std::pair<int, int>> children;  // VirtualTree: (tuple id, x_adj)
  std::vector<PathNodeRep> path;              // Class*: the compress path
  Bits class_x, class_y;
};

class TypeRegistry {
 public:
  int size() const { return static_cast<int>(tuples_.size()); }
  const TypeTuple& tuple(int i) const { return tuples_.at(i); }
  const Provenance& provenance(int i) const { return prov_.at(i); }
  std::optional<int> find(const TypeTuple& t) const;
  // Returns (id, inserted).
  std::pair<int, bool> add(TypeTuple t, Provenance prov);
  bool contains_all(const TypeRegistry& other) const;
  std::vector<TypeTuple> sorted_tuples() const;

 private:
  std::vector<TypeTuple> tuples_;
  std::vector<Provenance> prov_;
  std::map<TypeTuple, int> index_;
};

struct InvalidWitness {
  int poles = 0;                              // 0: a non-good 0-pole tree; 1: an empty type
  std::vector<std::pair<int, int>> children;  // (tuple id, x_adj)
  int x = 0;
  int iteration = 0;
};

struct ComputeTypesOptions {
  bool parallel = true;
  std::size_t max_states = 2000000;
};

struct BehaviorInfo {
  NodeBehavior behavior;
  PathNodeRep rep;
};

// Incremental Compute Types: states are the reachable per-configuration usage profiles of
// virtual trees built from the registry, so every multiset size is covered at once.
class TypeEngine {
 public:
  explicit TypeEngine(const NodeEdgeLFL& p, ComputeTypesOptions opts = {});

  std::pair<int, bool> add_tuple(TypeTuple t, Provenance prov) { return registry_.add(std::move(t), std::move(prov)); }
  // Closes the registry under virtual trees; returns the first invalid witness, if any.
  std::optional<InvalidWitness> run(int iteration_base = 0);
  const TypeRegistry& registry() const { return registry_; }
  const std::vector<BehaviorInfo>& behaviors();
  std::size_t state_count() const { return states_.size(); }
  int iterations() const { return iteration_; }
  // Representative incoming list of a state.
  std::vector<std::pair<int, int>> state_children(int state) const;

 private:
  static constexpr int kNone = -1;
  static constexpr int kFree = -2;
  struct ConfigCode {
    std::vector<int> pair;  // tracked entries
    std::vector<int> req;
    std::vector<char> star;
    std::vector<std::uint64_t> mul;
    std::vector<int> slot;  // per pair: tracked index, kFree, or kNone
    std::uint64_t full = 0;
  };
  struct Kind {
    int x_adj = 0;
    Bits b;
    int rep_tuple = 0;
    std::vector<std::vector<int>> moves;  // per config: tracked entries usable
    std::vector<char> free;               // per config: some free entry usable
  };
  using StateSets = std::vector<std::vector<std::uint64_t>>;
  struct State {
    StateSets sets;
    int parent = -1;
    int via = -1;
    std::size_t kinds_done = 0;
  };
  struct VecHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const;
  };

  std::optional<std::uint64_t> apply_pair(int c, std::uint64_t v, int pair) const;
  StateSets successor(const StateSets& s, const Kind& k) const;
  int intern(StateSets sets, int parent, int via);
  void add_kinds_for(int tuple);
  void expand_pending();
  Bits one_pole_type(const StateSets& s, int x) const;
  bool good(const StateSets& s) const;
  Bits two_pole_type(const StateSets& s, int xl, int xr) const;

  const NodeEdgeLFL* p_;
  ComputeTypesOptions opts_;
  TypeRegistry registry_;
  std::vector<ConfigCode> codes_;
  std::vector<Kind> kinds_;
  std::map<std::pair<int, Bits>, int> kind_index_;
  int tuples_kinded_ = 0;
  std::vector<State> states_;
  std::unordered_map<std::vector<std::uint64_t>, int, VecHash> state_index_;
  std::size_t harvested_ = 0;
  std::vector<BehaviorInfo> behaviors_;
  std::unordered_map<NodeBehavior, int, NodeBehaviorHash> behavior_index_;
  std::size_t behaviors_done_ = 0;
  int iteration_ = 0;
};

struct ComputeTypesResult {
  TypeRegistry registry;
  std::optional<InvalidWitness> invalid;
  int iterations = 0;
  std::size_t states = 0;
};
ComputeTypesResult compute_types(const NodeEdgeLFL& p, const TypeRegistry& seed = {},
                                 const ComputeTypesOptions& opts = {});

// ---------------------------------------------------------------------------
// Realizations

struct RealizedPath {
  int half_s = -1;
  int half_t = -1;
  Bits x, y;
};
struct Realization {
  TreeInstance tree;  // half-edge inputs set
  int special_half = -1;
  std::vector<RealizedPath> paths;
};

Realization minimal_realization(int tuple, const TypeRegistry& registry, std::size_t max_nodes = 200000);
// The tree whose root is the invalid virtual tree, with children realized.
Realization realize_invalid(const InvalidWitness& w, const TypeRegistry& registry, std::size_t max_nodes = 200000);

std::string type_to_string(const Bits& t, const NodeEdgeLFL& p);

}  // namespace lfl
