#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lfl {

struct MalformedInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);

  int size() const { return static_cast<int>(symbols_.size()); }
  const std::string& name(int i) const { return symbols_.at(i); }
  int index(std::string_view s) const;  // throws MalformedInput
  std::optional<int> find(std::string_view s) const;
  int add(std::string s);  // interns; returns the index
  const std::vector<std::string>& symbols() const { return symbols_; }
  bool operator==(const Alphabet& o) const { return symbols_ == o.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

// ---------------------------------------------------------------------------
// Node-edge checkable problems

struct NodeConfigEntry {
  int pair = 0;  // in * |sigma_out| + out
  int count = 0;
  bool star = false;
  auto operator<=>(const NodeConfigEntry&) const = default;
};
using NodeConfig = std::vector<NodeConfigEntry>;  // sorted by pair, one entry per pair

// Merges duplicate pairs (counts add, stars combine) and sorts.
NodeConfig canonical_node_config(std::vector<NodeConfigEntry> entries);

class NodeEdgeLFL {
 public:
  Alphabet sigma_in;
  Alphabet sigma_out;
  std::vector<NodeConfig> node_configs;
  std::vector<std::pair<int, int>> edge_configs;  // unordered pairs of pair-indices, stored p <= q

  // Canonicalizes configurations and builds lookup tables; call after editing.
  void finalize();

  int nin() const { return sigma_in.size(); }
  int nout() const { return sigma_out.size(); }
  int npairs() const { return nin() * nout(); }
  int pair(int in, int out) const { return in * nout() + out; }
  int pair_in(int p) const { return p / nout(); }
  int pair_out(int p) const { return p % nout(); }
  bool edge_ok(int p, int q) const { return edge_matrix_[static_cast<std::size_t>(p) * npairs() + q] != 0; }
  // Largest total multiplicity of a node configuration (the s of the shrinking bound).
  int max_config_size() const { return max_config_size_; }
  std::string pair_name(int p) const;

 private:
  std::vector<char> edge_matrix_;
  int max_config_size_ = 0;
};

using PairCounts = std::map<int, int>;  // pair index -> multiplicity

bool match_node_config(const PairCounts& labels, const NodeConfig& config);
bool match_edge_config(int p, int q, const NodeEdgeLFL& problem);

// ---------------------------------------------------------------------------
// Instances and labelings

struct TreeInstance {
  std::vector<std::string> ids;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbor, edge index)
  std::vector<int> node_inputs;                       // radius mode
  std::vector<int> half_inputs;                       // node-edge mode; half 2e+s sits at edges[e][s]

  static TreeInstance from_edges(int n, const std::vector<std::array<int, 2>>& edges);

  int n() const { return static_cast<int>(adj.size()); }
  int m() const { return static_cast<int>(edges.size()); }
  int degree(int v) const { return static_cast<int>(adj[v].size()); }
  int half_at(int e, int v) const { return edges[e][0] == v ? 2 * e : 2 * e + 1; }
  int half_node(int h) const { return edges[h / 2][h % 2]; }

  void check_tree() const;  // throws MalformedInput unless connected and acyclic
  // Copies each node input onto all of that node's half-edges.
  void fill_half_from_nodes();
};

// Half-edge labeling (size 2m) in node-edge mode, node labeling (size n) in radius mode.
using Labeling = std::vector<int>;

struct Violation {
  enum class Kind { Node, Edge };
  Kind kind;
  int id;
  std::string what;
};

struct Verdict {
  bool valid = true;
  std::vector<Violation> violations;
};

PairCounts node_pairs(const TreeInstance& inst, const Labeling& sigma, int v, const NodeEdgeLFL& problem);
Verdict verify_node_edge(const TreeInstance& inst, const Labeling& sigma, const NodeEdgeLFL& problem);

// ---------------------------------------------------------------------------
// Radius formalism

struct ConfigEdge {
  int u = 0;
  int v = 0;
  bool required = false;
};

// Output labels index a combined space: [0, |sigma_out|) are outputs, the rest auxiliary.
struct RadiusConfiguration {
  int center = 0;
  std::vector<int> in;
  std::vector<int> out;
  std::vector<ConfigEdge> edges;
  std::string name;
  int size() const { return static_cast<int>(in.size()); }
};

struct PreparedConfig {
  bool matchable = true;
  std::vector<char> in_required;               // node lies in the required subgraph
  std::vector<std::vector<int>> req_children;  // children in the required tree rooted at the center
  std::vector<std::vector<int>> opt_neighbors; // neighbors outside the required subgraph
};

class RadiusLFL {
 public:
  Alphabet sigma_in;
  Alphabet sigma_out;
  Alphabet aux;
  int radius = 1;
  std::vector<RadiusConfiguration> configs;
  std::vector<std::pair<int, int>> order;  // (lower, upper) in label space
  bool allow_disconnected_required = false;

  // Closes the order, validates every configuration and prepares matching tables.
  void finalize();

  int nin() const { return sigma_in.size(); }
  int nout() const { return sigma_out.size(); }
  int nlabels() const { return sigma_out.size() + aux.size(); }
  bool le(int a, int b) const { return leq_[static_cast<std::size_t>(a) * nlabels() + b] != 0; }
  bool trivial_order() const;  // no auxiliary labels and no strict order among outputs
  const PreparedConfig& prepared(int i) const { return prepared_.at(i); }
  std::string label_name(int l) const;

 private:
  std::vector<char> leq_;
  std::vector<PreparedConfig> prepared_;
};

PreparedConfig prepare_config(const RadiusConfiguration& c, int radius, bool allow_disconnected);

// Returns f with f[z] = config node for every node z of the r-ball around v (-1 outside it).
std::optional<std::vector<int>> match_radius_configuration(const TreeInstance& inst, const Labeling& outputs, int v,
                                                           const RadiusLFL& problem, int config);
bool node_matches_some_config(const TreeInstance& inst, const Labeling& outputs, int v, const RadiusLFL& problem);
Verdict verify_radius(const TreeInstance& inst, const Labeling& outputs, const RadiusLFL& problem);

struct EliminationResult {
  RadiusLFL problem;
  std::vector<std::string> warnings;
};
EliminationResult eliminate_auxiliary(const RadiusLFL& problem);

// Drops output labels that no configuration center can carry, together with the
// configuration parts that reference them; valid labelings are unaffected.
RadiusLFL prune_unusable_outputs(const RadiusLFL& problem, std::vector<std::string>* notes = nullptr);

}  // namespace lfl
