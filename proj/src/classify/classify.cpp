#include "lfl/classify.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "lfl/io.hpp"

namespace lfl {

bool class_valid(const IndependentClass& c, const Bits& path_type, int nout) {
  for (int a : c.x.members())
    for (int b : c.y.members())
      if (!path_type.test(a * nout + b)) return false;
  return true;
}

std::vector<IndependentClass> enumerate_candidate_classes(const Bits& path_type, int nout, std::size_t cap) {
  std::vector<Bits> rows(nout, Bits(nout));
  for (int a = 0; a < nout; ++a)
    for (int b = 0; b < nout; ++b)
      if (path_type.test(a * nout + b)) rows[a].set(b);
  // Intents are the intersections of row sets.
  std::set<Bits> intents;
  for (const auto& r : rows) {
    if (r.none()) continue;
    std::vector<Bits> add{r};
    for (const auto& i : intents) {
      Bits m = i & r;
      if (m.any()) add.push_back(m);
    }
    intents.insert(add.begin(), add.end());
    if (intents.size() > cap) throw PreconditionError("too many candidate classes");
  }
  std::vector<IndependentClass> out;
  for (const auto& y : intents) {
    Bits x(nout);
    for (int a = 0; a < nout; ++a)
      if (y.subset_of(rows[a])) x.set(a);
    out.push_back({x, y});
  }
  std::sort(out.begin(), out.end(), [](const IndependentClass& a, const IndependentClass& b) {
    long long sa = static_cast<long long>(a.x.count()) * a.y.count();
    long long sb = static_cast<long long>(b.x.count()) * b.y.count();
    if (sa != sb) return sa > sb;
    return a < b;
  });
  out.push_back({Bits(nout), Bits(nout)});
  return out;
}

IndependentClass induced_class_from_label(const std::vector<NodeBehavior>& path, int position, int y,
                                          const NodeEdgeLFL& p) {
  const int k = p.nout();
  if (position < 0 || position + 1 >= static_cast<int>(path.size()))
    throw PreconditionError("split position must lie inside the path");
  std::vector<NodeBehavior> prefix(path.begin(), path.begin() + position + 1);
  NodeBehavior left = compress_path_type(prefix, p);
  NodeBehavior right = compress_path_type_suffix(path, position + 1, p);
  IndependentClass c{Bits(k), Bits(k)};
  for (int ys = 0; ys < k; ++ys)
    if (left.type.test(ys * k + y)) c.x.set(ys);
  for (int yl = 0; yl < k; ++yl) {
    if (!p.edge_ok(p.pair(left.x_right, y), p.pair(right.x_left, yl))) continue;
    for (int yt = 0; yt < k; ++yt)
      if (right.type.test(yl * k + yt)) c.y.set(yt);
  }
  return c;
}

namespace {

// Interned path states with memoized transitions.
class PathAutomaton {
 public:
  explicit PathAutomaton(const NodeEdgeLFL& p) : p_(p) {}

  int intern(const NodeBehavior& b) {
    auto [it, fresh] = index_.emplace(b, static_cast<int>(states_.size()));
    if (fresh) states_.push_back(b);
    return it->second;
  }

  int step(int s, int b) {
    const std::uint64_t key = (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint32_t>(b);
    auto it = trans_.find(key);
    if (it != trans_.end()) return it->second;
    NodeBehavior t = path_type_step(states_[s], states_[b], p_);
    const int id = intern(t);
    trans_.emplace(key, id);
    return id;
  }

  const NodeBehavior& state(int s) const { return states_[s]; }

 private:
  const NodeEdgeLFL& p_;
  std::vector<NodeBehavior> states_;
  std::unordered_map<NodeBehavior, int, NodeBehaviorHash> index_;
  std::unordered_map<std::uint64_t, int> trans_;
};

std::vector<ReachableSignature> reachable_on(PathAutomaton& a, const std::vector<NodeBehavior>& behaviors, int lo,
                                             int hi) {
  struct Rec {
    int parent;
    int beh;
  };
  using Layer = std::vector<std::pair<int, int>>;  // (state, rec), sorted by state content
  auto by_content = [&](const std::pair<int, int>& x, const std::pair<int, int>& y) {
    return a.state(x.first) < a.state(y.first);
  };
  std::vector<int> beh_ids;
  for (const auto& b : behaviors) beh_ids.push_back(a.intern(b));
  std::vector<Rec> recs;
  Layer layer;
  {
    std::map<int, int> first;
    for (int i = 0; i < static_cast<int>(beh_ids.size()); ++i)
      if (first.emplace(beh_ids[i], static_cast<int>(recs.size())).second) recs.push_back({-1, i});
    layer.assign(first.begin(), first.end());
    std::sort(layer.begin(), layer.end(), by_content);
  }
  std::map<std::vector<int>, int> first_len;
  std::vector<Layer> layers{Layer{}};
  std::map<int, int> out;
  for (int len = 1; len <= hi && !layer.empty(); ++len) {
    std::vector<int> key;
    for (auto [s, r] : layer) key.push_back(s);
    std::sort(key.begin(), key.end());
    auto [it, fresh] = first_len.emplace(std::move(key), len);
    if (!fresh) {
      // Layers are periodic from here on.
      const int start = it->second, period = len - start;
      for (int m = std::max(len, lo), c = 0; m <= hi && c < period; ++m, ++c)
        for (auto [s, r] : layers[start + (m - len) % period]) out.emplace(s, r);
      break;
    }
    layers.push_back(layer);
    if (len >= lo)
      for (auto [s, r] : layer) out.emplace(s, r);
    if (len == hi) break;
    std::map<int, int> next;
    for (auto [s, r] : layer)
      for (int i = 0; i < static_cast<int>(beh_ids.size()); ++i) {
        const int t = a.step(s, beh_ids[i]);
        if (next.emplace(t, static_cast<int>(recs.size())).second) recs.push_back({r, i});
      }
    layer.assign(next.begin(), next.end());
    std::sort(layer.begin(), layer.end(), by_content);
  }
  std::vector<ReachableSignature> res;
  for (const auto& [s, id] : out) {
    ReachableSignature r{a.state(s), {}};
    for (int q = id; q >= 0; q = recs[q].parent) r.sequence.push_back(recs[q].beh);
    std::reverse(r.sequence.begin(), r.sequence.end());
    res.push_back(std::move(r));
  }
  std::sort(res.begin(), res.end(),
            [](const ReachableSignature& x, const ReachableSignature& y) { return x.signature < y.signature; });
  return res;
}

}  // namespace

std::vector<ReachableSignature> reachable_signatures(const std::vector<NodeBehavior>& behaviors, int lo, int hi,
                                                     const NodeEdgeLFL& p) {
  PathAutomaton a(p);
  return reachable_on(a, behaviors, lo, hi);
}

class SignatureCache {
 public:
  explicit SignatureCache(const NodeEdgeLFL& p) : automaton_(p) {}

  std::shared_ptr<const std::vector<ReachableSignature>> get(const std::vector<NodeBehavior>& behaviors, int lo,
                                                             int hi) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(behaviors);
    if (it != memo_.end()) return it->second;
    auto sigs = std::make_shared<const std::vector<ReachableSignature>>(reachable_on(automaton_, behaviors, lo, hi));
    return memo_.emplace(behaviors, std::move(sigs)).first->second;
  }

 private:
  std::mutex mu_;
  PathAutomaton automaton_;
  std::map<std::vector<NodeBehavior>, std::shared_ptr<const std::vector<ReachableSignature>>> memo_;
};

std::shared_ptr<SignatureCache> make_signature_cache(const NodeEdgeLFL& p) {
  return std::make_shared<SignatureCache>(p);
}

namespace {

// Class for a signature, or null when the assigner leaves it undefined.
using ChooseFn = std::function<const IndependentClass*(const NodeBehavior&)>;

TestingResult run_testing(const TypeEngine& start, const ChooseFn& choose, const NodeEdgeLFL& p,
                          const TestingOptions& opts, TypeEngine* final_engine) {
  TypeEngine eng = start;
  TestingResult r;
  r.registry_sizes.push_back(eng.registry().size());
  const int cap = (p.nout() >= 30 ? (1 << 30) : (1 << p.nout())) * std::max(1, p.nin()) + 2;
  auto finish = [&](TestingResult&& res) {
    if (final_engine) *final_engine = std::move(eng);
    return std::move(res);
  };
  for (int iteration = 0;; ++iteration) {
    if (iteration > cap) throw std::logic_error("testing procedure exceeded its iteration bound");
    const auto& infos = eng.behaviors();
    std::vector<NodeBehavior> behaviors;
    for (const auto& b : infos) behaviors.push_back(b.behavior);
    std::vector<PathNodeRep> reps;
    for (const auto& b : infos) reps.push_back(b.rep);
    auto held = opts.cache ? opts.cache->get(behaviors, opts.ell, 2 * opts.ell)
                           : std::make_shared<const std::vector<ReachableSignature>>(
                                 reachable_signatures(behaviors, opts.ell, 2 * opts.ell, p));
    const auto& sigs = *held;
    r.signature_counts.push_back(sigs.size());
    std::vector<const IndependentClass*> classes;
    for (const auto& s : sigs) {
      const IndependentClass* c = choose(s.signature);
      if (!c) {
        r.k = iteration;
        r.missing = s.signature;
        r.stop = "assigner undefined on a reachable signature";
        return finish(std::move(r));
      }
      if (!class_valid(*c, s.signature.type, p.nout()))
        throw std::logic_error("assigned class is not valid for its signature");
      if (c->empty()) {
        r.k = iteration;
        r.stop = "empty class assigned";
        return finish(std::move(r));
      }
      classes.push_back(c);
    }
    const int before = eng.registry().size();
    const int tag = eng.iterations() + 1;
    for (std::size_t i = 0; i < sigs.size(); ++i) {
      Provenance prov;
      prov.iteration = tag;
      for (int b : sigs[i].sequence) prov.path.push_back(reps[b]);
      prov.class_x = classes[i]->x;
      prov.class_y = classes[i]->y;
      prov.kind = Provenance::Kind::ClassLeft;
      TypeTuple left{classes[i]->x, sigs[i].signature.x_left};
      if (eng.add_tuple(left, prov).second) r.deltas.push_back({iteration, left, prov.kind});
      prov.kind = Provenance::Kind::ClassRight;
      TypeTuple right{classes[i]->y, sigs[i].signature.x_right};
      if (eng.add_tuple(right, prov).second) r.deltas.push_back({iteration, right, prov.kind});
    }
    const int with_classes = eng.registry().size();
    auto invalid = eng.run(tag);
    for (int id = with_classes; id < eng.registry().size(); ++id)
      r.deltas.push_back({iteration, eng.registry().tuple(id), Provenance::Kind::VirtualTree});
    r.registry_sizes.push_back(eng.registry().size());
    if (invalid) {
      r.k = iteration;
      r.stop = "compute types reported an invalid problem";
      return finish(std::move(r));
    }
    if (eng.registry().size() == before) {
      r.infinite = true;
      r.k = iteration;
      r.stop = "registry stable";
      return finish(std::move(r));
    }
  }
}

}  // namespace

TestingResult testing_procedure(const TypeEngine& start, const Assigner& f, const NodeEdgeLFL& p,
                                const TestingOptions& opts, TypeEngine* final_engine) {
  return run_testing(
      start,
      [&](const NodeBehavior& s) -> const IndependentClass* {
        auto it = f.find(s);
        return it == f.end() ? nullptr : &it->second;
      },
      p, opts, final_engine);
}

namespace {

bool better(const TestingResult& a, const TestingResult& b) {
  if (a.infinite != b.infinite) return a.infinite;
  return !a.infinite && a.k > b.k;
}

// Each evaluation completes the assigner greedily: signatures without an override take
// their largest candidate class. Children override one more signature used by the parent.
struct Searcher {
  const TypeEngine& start;
  const NodeEdgeLFL& p;
  TestingOptions topts;
  SearchOptions opts;

  std::mutex mu;
  std::vector<NodeBehavior> sig_table;
  std::map<NodeBehavior, int> sig_index;
  std::map<Bits, std::vector<IndependentClass>> cand_cache;
  std::set<std::map<int, int>> visited;

  SearchResult best;
  bool have_best = false;
  std::size_t evals = 0;
  bool incomplete = false;

  Searcher(const TypeEngine& e, const NodeEdgeLFL& prob, TestingOptions t, SearchOptions o)
      : start(e), p(prob), topts(std::move(t)), opts(o) {}

  struct Node {
    std::map<int, int> overrides;  // signature id -> candidate index
    TestingResult result;
    std::vector<std::pair<int, int>> used;  // (signature id, candidate index) in order of use
  };

  int sig_id(const NodeBehavior& s) {
    std::lock_guard<std::mutex> lock(mu);
    auto [it, fresh] = sig_index.emplace(s, static_cast<int>(sig_table.size()));
    if (fresh) sig_table.push_back(s);
    return it->second;
  }

  const std::vector<IndependentClass>& candidates(const Bits& t) {
    {
      std::lock_guard<std::mutex> lock(mu);
      auto it = cand_cache.find(t);
      if (it != cand_cache.end()) return it->second;
    }
    auto c = enumerate_candidate_classes(t, p.nout());
    std::lock_guard<std::mutex> lock(mu);
    return cand_cache.emplace(t, std::move(c)).first->second;
  }

  Node evaluate(std::map<int, int> overrides) {
    Node n;
    n.overrides = std::move(overrides);
    n.result = run_testing(
        start,
        [&](const NodeBehavior& s) -> const IndependentClass* {
          const int id = sig_id(s);
          auto it = n.overrides.find(id);
          const int idx = it == n.overrides.end() ? 0 : it->second;
          n.used.push_back({id, idx});
          return &candidates(s.type)[idx];
        },
        p, topts, nullptr);
    return n;
  }

  void consider(const Node& n) {
    if (have_best && !better(n.result, best.result)) return;
    best.result = n.result;
    best.assigner.clear();
    for (auto [id, idx] : n.used) best.assigner[sig_table[id]] = candidates(sig_table[id].type)[idx];
    have_best = true;
  }

  // Returns true once an infinitely good assigner is found.
  bool expand(const Node& node) {
    std::vector<std::map<int, int>> kids;
    std::set<int> seen_sig;
    for (auto [id, idx] : node.used) {
      if (node.overrides.count(id) || !seen_sig.insert(id).second) continue;
      const int m = static_cast<int>(candidates(sig_table[id].type).size());
      for (int c = 0; c < m; ++c) {
        if (c == idx) continue;
        auto o = node.overrides;
        o[id] = c;
        if (visited.insert(o).second) kids.push_back(std::move(o));
      }
    }
    const std::size_t left = opts.budget > evals ? opts.budget - evals : 0;
    if (kids.size() > left) {
      kids.resize(left);
      incomplete = true;
    }
    if (kids.empty()) return false;
    std::vector<Node> nodes(kids.size());
    const long long m = static_cast<long long>(kids.size());
    if (opts.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
      for (long long i = 0; i < m; ++i) nodes[i] = evaluate(kids[i]);
    } else {
      for (long long i = 0; i < m; ++i) nodes[i] = evaluate(kids[i]);
    }
    evals += kids.size();
    for (const auto& n : nodes) {
      consider(n);
      if (n.result.infinite) return true;
    }
    for (const auto& n : nodes)
      if (expand(n)) return true;
    return false;
  }
};

}  // namespace

SearchResult search_assigners(const TypeEngine& start, const NodeEdgeLFL& p, int ell, const SearchOptions& opts) {
  TestingOptions topts;
  topts.ell = ell;
  topts.parallel = opts.parallel;
  topts.cache = make_signature_cache(p);
  Searcher s{start, p, topts, opts};
  s.visited.insert({});
  auto root = s.evaluate({});
  s.evals = 1;
  s.consider(root);
  if (!root.result.infinite) s.expand(root);
  s.best.incomplete = s.incomplete && !s.best.result.infinite;
  s.best.evaluations = s.evals;
  return s.best;
}

int default_ell(TypeEngine& engine, const NodeEdgeLFL& p, std::size_t* states) {
  std::vector<NodeBehavior> behaviors;
  for (const auto& b : engine.behaviors()) behaviors.push_back(b.behavior);
  std::size_t n = count_path_states(behaviors, p);
  if (states) *states = n;
  return static_cast<int>(std::max<std::size_t>(n, 2));
}

Classification classify_problem(const NodeEdgeLFL& p, const SearchOptions& opts) {
  Classification c;
  ComputeTypesOptions copts;
  copts.parallel = opts.parallel;
  TypeEngine engine(p, copts);
  c.invalid = engine.run();
  c.initial_registry = engine.registry();
  if (c.invalid) {
    c.kind = VerdictKind::Unsolvable;
    c.witness = realize_invalid(*c.invalid, c.initial_registry);
    return c;
  }
  std::size_t states = 0;
  const int pump = default_ell(engine, p, &states);
  c.path_states = states;
  c.ell = opts.ell > 0 ? opts.ell : pump;
  c.search = search_assigners(engine, p, c.ell, opts);
  if (c.search.result.infinite) {
    c.kind = VerdictKind::Logarithmic;
  } else {
    c.kind = VerdictKind::PolyTheta;
    c.exponent = c.search.result.k + 1;
  }
  return c;
}

std::string verdict_line(const Classification& c) {
  switch (c.kind) {
    case VerdictKind::Unsolvable:
      return "UNSOLVABLE";
    case VerdictKind::Logarithmic:
      return "O(log n)";
    case VerdictKind::PolyTheta:
      return "THETA n^(1/" + std::to_string(c.exponent) + ")";
  }
  return "";
}

namespace {

nlohmann::json labels_json(const Bits& b, const NodeEdgeLFL& p) {
  auto j = nlohmann::json::array();
  for (int m : b.members()) j.push_back(p.sigma_out.name(m));
  return j;
}

nlohmann::json pairs_json(const Bits& b, const NodeEdgeLFL& p) {
  auto j = nlohmann::json::array();
  const int k = p.nout();
  for (int m : b.members()) j.push_back({p.sigma_out.name(m / k), p.sigma_out.name(m % k)});
  return j;
}

Bits labels_from_json(const nlohmann::json& j, const NodeEdgeLFL& p) {
  Bits b(p.nout());
  for (const auto& s : j) b.set(p.sigma_out.index(s.get<std::string>()));
  return b;
}

const char* kind_name(Provenance::Kind k) {
  switch (k) {
    case Provenance::Kind::Seed:
      return "seed";
    case Provenance::Kind::VirtualTree:
      return "virtual-tree";
    case Provenance::Kind::ClassLeft:
      return "class-left";
    case Provenance::Kind::ClassRight:
      return "class-right";
  }
  return "";
}

}  // namespace

namespace {

constexpr int kMaxPairListing = 8;  // wider alphabets write the type as a hex bitstring

constexpr const char* kHex = "0123456789abcdef";

// Bit i lives in digit i / 4, at weight 2^(i % 4).
std::string bits_hex(const Bits& b) {
  std::vector<int> nibble((b.width() + 3) / 4, 0);
  for (int i : b.members()) nibble[i / 4] |= 1 << (i % 4);
  std::string s;
  for (int d : nibble) s += kHex[d];
  return s;
}

Bits bits_from_hex(const std::string& s, int width) {
  if (static_cast<int>(s.size()) != (width + 3) / 4) throw MalformedInput("type bitstring has the wrong length");
  Bits b(width);
  for (int i = 0; i < width; ++i) {
    const auto d = std::string(kHex).find(s[i / 4]);
    if (d == std::string::npos) throw MalformedInput("type bitstring is not hex");
    if (d >> (i % 4) & 1) b.set(i);
  }
  return b;
}

}  // namespace

nlohmann::json assigner_to_json(const Assigner& f, const NodeEdgeLFL& p) {
  auto arr = nlohmann::json::array();
  for (const auto& [sig, cls] : f) {
    nlohmann::json e = {{"x_left", p.sigma_in.name(sig.x_left)},
                        {"x_right", p.sigma_in.name(sig.x_right)},
                        {"X", labels_json(cls.x, p)},
                        {"Y", labels_json(cls.y, p)}};
    if (p.nout() <= kMaxPairListing)
      e["type"] = pairs_json(sig.type, p);
    else
      e["type_bits"] = bits_hex(sig.type);
    arr.push_back(std::move(e));
  }
  return arr;
}

Assigner assigner_from_json(const nlohmann::json& j, const NodeEdgeLFL& p) {
  Assigner f;
  const int k = p.nout();
  try {
    for (const auto& e : j) {
      NodeBehavior sig{Bits(k * k), p.sigma_in.index(e.at("x_left").get<std::string>()),
                       p.sigma_in.index(e.at("x_right").get<std::string>())};
      if (e.contains("type_bits")) {
        sig.type = bits_from_hex(e.at("type_bits").get<std::string>(), k * k);
      } else {
        for (const auto& pr : e.at("type"))
          sig.type.set(p.sigma_out.index(pr.at(0).get<std::string>()) * k +
                       p.sigma_out.index(pr.at(1).get<std::string>()));
      }
      f[sig] = {labels_from_json(e.at("X"), p), labels_from_json(e.at("Y"), p)};
    }
  } catch (const nlohmann::json::exception& ex) {
    throw MalformedInput(std::string("assigner: ") + ex.what());
  }
  return f;
}

nlohmann::json classification_to_json(const Classification& c, const NodeEdgeLFL& p) {
  nlohmann::json j;
  j["verdict"] = verdict_line(c);
  j["initial_registry"] = nlohmann::json::array();
  for (int i = 0; i < c.initial_registry.size(); ++i) {
    const auto& t = c.initial_registry.tuple(i);
    j["initial_registry"].push_back({{"type", labels_json(t.type, p)}, {"input", p.sigma_in.name(t.x)}});
  }
  if (c.kind == VerdictKind::Unsolvable) {
    if (c.witness) {
      j["witness"] = instance_to_json(c.witness->tree, p.sigma_in, true);
      j["witness_nodes"] = c.witness->tree.n();
    }
    return j;
  }
  if (c.kind == VerdictKind::PolyTheta) j["exponent"] = c.exponent;
  const auto& r = c.search.result;
  j["ell"] = c.ell;
  j["path_states"] = c.path_states;
  j["k"] = r.infinite ? nlohmann::json("infinity") : nlohmann::json(r.k);
  j["lower_bound_only"] = c.search.incomplete;
  j["evaluations"] = c.search.evaluations;
  j["assigner"] = assigner_to_json(c.search.assigner, p);
  auto trace = nlohmann::json::array();
  for (const auto& d : r.deltas)
    trace.push_back({{"iteration", d.iteration},
                     {"type", labels_json(d.tuple.type, p)},
                     {"input", p.sigma_in.name(d.tuple.x)},
                     {"source", kind_name(d.kind)}});
  j["trace"] = {{"stop", r.stop},
                {"iteration_convention", "k counts loop passes that grew the registry; the pass with k = 0 is the first"},
                {"registry_sizes", r.registry_sizes},
                {"signature_counts", r.signature_counts},
                {"deltas", trace}};
  return j;
}

}  // namespace lfl
