#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lfl/types.hpp"

namespace lfl {

struct IndependentClass {
  Bits x, y;
  bool empty() const { return x.none() || y.none(); }
  bool operator==(const IndependentClass& o) const { return x == o.x && y == o.y; }
  bool operator<(const IndependentClass& o) const { return x != o.x ? x < o.x : y < o.y; }
};

// Maximal rectangles X x Y inside a two-pole type, largest first, then the empty class.
std::vector<IndependentClass> enumerate_candidate_classes(const Bits& path_type, int nout, std::size_t cap = 4096);
bool class_valid(const IndependentClass& c, const Bits& path_type, int nout);

// Class induced by fixing label y on the right half-edge of path node `position`
// (the edge between `position` and `position + 1`).
IndependentClass induced_class_from_label(const std::vector<NodeBehavior>& path, int position, int y,
                                          const NodeEdgeLFL& p);

// Signatures are path states (type with end inputs); all lengths in [ell, 2 ell] share one bucket.
using Assigner = std::map<NodeBehavior, IndependentClass>;

struct RegistryDelta {
  int iteration = 0;
  TypeTuple tuple;
  Provenance::Kind kind = Provenance::Kind::VirtualTree;
};

struct TestingResult {
  bool infinite = false;
  int k = 0;
  std::optional<NodeBehavior> missing;  // first signature the assigner does not cover
  std::string stop;                     // why the loop ended
  std::vector<RegistryDelta> deltas;
  std::vector<int> registry_sizes;      // after each compute_types call
  std::vector<std::size_t> signature_counts;
};

// Memo of reachable signatures keyed by the behavior list; safe to share between threads.
class SignatureCache;
std::shared_ptr<SignatureCache> make_signature_cache(const NodeEdgeLFL& p);

struct TestingOptions {
  int ell = 2;
  bool parallel = true;
  std::shared_ptr<SignatureCache> cache;
};

// Reachable signatures over the behaviors, with a representative behavior sequence each.
struct ReachableSignature {
  NodeBehavior signature;
  std::vector<int> sequence;  // indices into the behavior list
};
std::vector<ReachableSignature> reachable_signatures(const std::vector<NodeBehavior>& behaviors, int lo, int hi,
                                                     const NodeEdgeLFL& p);

// Runs the testing procedure from an engine already closed from the empty registry.
TestingResult testing_procedure(const TypeEngine& start, const Assigner& f, const NodeEdgeLFL& p,
                                const TestingOptions& opts, TypeEngine* final_engine = nullptr);

struct SearchOptions {
  int ell = -1;  // -1: the pumping state count (at least 2)
  std::size_t budget = 2000;
  bool parallel = true;
};

struct SearchResult {
  Assigner assigner;
  TestingResult result;
  bool incomplete = false;
  std::size_t evaluations = 0;
};

SearchResult search_assigners(const TypeEngine& start, const NodeEdgeLFL& p, int ell, const SearchOptions& opts);

enum class VerdictKind { Unsolvable, PolyTheta, Logarithmic };

struct Classification {
  VerdictKind kind = VerdictKind::Unsolvable;
  int exponent = 0;  // PolyTheta: Theta(n^(1/exponent)), exponent = k* + 1
  int ell = 2;
  std::size_t path_states = 0;
  SearchResult search;
  TypeRegistry initial_registry;
  std::optional<InvalidWitness> invalid;
  std::optional<Realization> witness;
};

Classification classify_problem(const NodeEdgeLFL& p, const SearchOptions& opts = {});
int default_ell(TypeEngine& engine, const NodeEdgeLFL& p, std::size_t* states = nullptr);

std::string verdict_line(const Classification& c);
nlohmann::json assigner_to_json(const Assigner& f, const NodeEdgeLFL& p);
Assigner assigner_from_json(const nlohmann::json& j, const NodeEdgeLFL& p);
nlohmann::json classification_to_json(const Classification& c, const NodeEdgeLFL& p);

}  // namespace lfl
