#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lfl/classify.hpp"
#include "lfl/core.hpp"
#include "lfl/types.hpp"

namespace lfl {

// ---------------------------------------------------------------------------
// Rake and compress

struct PhaseRounds {
  std::string phase;
  long long rounds = 0;
};

// Layer numbers: rake layer i is 2i, compress layer i (i >= 1) is 2i - 1.
struct RCDecomposition {
  int gamma = 1;
  int ell = 2;
  int k = 1;  // rake layers used
  std::vector<int> layer;
  std::vector<int> sublayer;  // 1-based inside rake layers, 0 for compress nodes
  std::vector<std::vector<int>> paths;
  std::vector<int> path_of;  // -1 for rake nodes
  std::vector<PhaseRounds> accounting;
  std::vector<std::string> log;

  std::pair<int, int> key(int v) const { return {layer[v], sublayer[v]}; }
  bool is_rake(int v) const { return layer[v] % 2 == 0; }
  long long rounds() const;
};

// k rake layers with k - 1 compress layers in between; throws PreconditionError naming the
// residue when nodes remain after the last rake layer.
RCDecomposition rc_decompose(const TreeInstance& t, int gamma, int ell, int k);
// ceil(n^(1/k) (ell/2)^(1 - 1/k)); n for k = 1.
int poly_gamma(int n, int ell, int k);
RCDecomposition rc_decompose_poly(const TreeInstance& t, int ell, int k);
// Constant gamma; rake and compress alternate until nothing remains.
RCDecomposition rc_decompose_log(const TreeInstance& t, int ell, int gamma = 1);

struct DecompositionCheck {
  bool ok = true;
  std::vector<std::string> problems;
  int max_rake_diameter = 0;
};
DecompositionCheck validate_decomposition(const TreeInstance& t, const RCDecomposition& d);

int log_star(long long n);

// ---------------------------------------------------------------------------
// Layered solving

struct AssignmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LayerAssignment {
  std::vector<VirtualTree> node_vt;              // poles: 0 (root), 1 (rake), 2 (compress)
  std::vector<std::vector<int>> child_edges;     // aligned with node_vt[v].incoming
  std::vector<int> up_half;                      // rake nodes: half at v toward the higher neighbor
  std::vector<std::array<int, 2>> pole_halves;   // compress nodes: (left, right) halves at v
  std::vector<Bits> half_type;                   // per half at the lower endpoint of an edge
  std::vector<IndependentClass> path_class;
  std::vector<std::vector<NodeBehavior>> path_behaviors;
};

LayerAssignment assign_layers(const TreeInstance& t, const RCDecomposition& d, const Assigner& f,
                              const NodeEdgeLFL& p);
Labeling propagate_solution(const TreeInstance& t, const RCDecomposition& d, const LayerAssignment& a,
                            const NodeEdgeLFL& p);

// Leaf elimination from an arbitrary root, then top-down label choice.
std::optional<Labeling> solve_diameter(const TreeInstance& t, const NodeEdgeLFL& p);

// Backtracking over half-edges in index order; returns the lexicographically first valid
// labeling. Throws PreconditionError when more than `cap` search nodes are needed.
std::optional<Labeling> brute_force_solve(const TreeInstance& t, const NodeEdgeLFL& p, std::uint64_t cap = 10000000);

enum class SolveMode { Poly, Log, Diameter };

struct SolveOptions {
  SolveMode mode = SolveMode::Diameter;
  int ell = 2;
  int k = 1;          // poly mode: rake layers
  int log_gamma = 1;  // log mode
  const Assigner* assigner = nullptr;
};

struct SolveReport {
  std::optional<Labeling> labeling;
  bool valid = false;
  long long rounds = 0;
  int layers = 0;
  std::string error;
  std::vector<PhaseRounds> accounting;
};

SolveReport solve_instance(const TreeInstance& t, const NodeEdgeLFL& p, const SolveOptions& opts);
std::vector<SolveReport> solve_batch(const std::vector<TreeInstance>& ts, const NodeEdgeLFL& p,
                                     const SolveOptions& opts, bool parallel = true);

// Solve options matching a classification: log mode for O(log n), poly mode with
// k = k* + 1 rake layers otherwise.
SolveOptions solve_options_for(const Classification& c);

// ---------------------------------------------------------------------------
// Gadget paths

std::uint64_t partition_count(int g);  // exact for g <= 400
// Partition number `index` (1-based) of g in the canonical order: lexicographic on
// descending parts, so [g] comes first.
std::vector<int> partition_unrank(int g, std::uint64_t index);
std::uint64_t partition_rank(const std::vector<int>& parts);  // 1-based
std::vector<std::vector<int>> partitions_of(int g);

bool gadget_g_valid(double alpha, int g);
long long gadget_max_length(double alpha, int g);  // floor(g^(1/alpha - 1) / 2)

struct GadgetInstance {
  TreeInstance tree;
  double alpha = 0.5;
  int g = 0;
  int length = 0;
  int first_index = 1;
  int padding = 0;
  std::vector<int> path;           // v_first .. v_last
  std::vector<int> gadget_of;      // per node: gadget index for path and gadget nodes, 0 for padding
  std::vector<int> required;       // ground-truth outputs
  int unpadded_nodes() const { return tree.n() - padding; }
};

// Unvalidated builder: path nodes carrying gadgets first_index .. first_index + L - 1.
GadgetInstance build_gadget_path(int g, int L, int padding, int first_index = 1, double alpha = 0.5);
GadgetInstance generate_gadget_instance(double alpha, int g, int L, int padding = 0);

struct GadgetCheck {
  bool valid = true;
  std::vector<int> violations;
};
GadgetCheck check_gadget_labeling(const GadgetInstance& inst, const std::vector<int>& outputs);

struct IndistinguishabilityPair {
  GadgetInstance g1, g2;
  int v1 = -1, v2 = -1;  // v_L in each instance
  int radius = 0;
  bool views_equal = false;
  bool next_views_differ = false;
};
IndistinguishabilityPair indistinguishability_pair(int n, double alpha);

}  // namespace lfl
