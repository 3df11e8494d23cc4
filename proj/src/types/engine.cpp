#include <algorithm>
#include <limits>

#include "lfl/types.hpp"

namespace lfl {

std::optional<int> TypeRegistry::find(const TypeTuple& t) const {
  auto it = index_.find(t);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::pair<int, bool> TypeRegistry::add(TypeTuple t, Provenance prov) {
  auto it = index_.find(t);
  if (it != index_.end()) return {it->second, false};
  int id = size();
  index_.emplace(t, id);
  tuples_.push_back(std::move(t));
  prov_.push_back(std::move(prov));
  return {id, true};
}

bool TypeRegistry::contains_all(const TypeRegistry& other) const {
  for (const auto& [t, id] : other.index_)
    if (!index_.count(t)) return false;
  return true;
}

std::vector<TypeTuple> TypeRegistry::sorted_tuples() const {
  std::vector<TypeTuple> out;
  for (const auto& [t, id] : index_) out.push_back(t);
  return out;
}

std::size_t TypeEngine::VecHash::operator()(const std::vector<std::uint64_t>& v) const {
  std::size_t h = v.size();
  for (auto x : v) h = hash_combine(h, std::hash<std::uint64_t>{}(x));
  return h;
}

TypeEngine::TypeEngine(const NodeEdgeLFL& p, ComputeTypesOptions opts) : p_(&p), opts_(opts) {
  const auto limit = std::numeric_limits<std::uint64_t>::max() / 2;
  for (const auto& cfg : p.node_configs) {
    ConfigCode code;
    code.slot.assign(p.npairs(), kNone);
    std::uint64_t mul = 1;
    for (const auto& e : cfg) {
      if (e.count == 0) {
        if (e.star) code.slot[e.pair] = kFree;
        continue;
      }
      code.slot[e.pair] = static_cast<int>(code.pair.size());
      code.pair.push_back(e.pair);
      code.req.push_back(e.count);
      code.star.push_back(e.star);
      code.mul.push_back(mul);
      code.full += mul * static_cast<std::uint64_t>(e.count);
      if (mul > limit / (static_cast<std::uint64_t>(e.count) + 1))
        throw PreconditionError("node configuration too large for the type automaton");
      mul *= static_cast<std::uint64_t>(e.count) + 1;
    }
    codes_.push_back(std::move(code));
  }
  intern(StateSets(codes_.size(), std::vector<std::uint64_t>{0}), -1, -1);
}

std::optional<std::uint64_t> TypeEngine::apply_pair(int c, std::uint64_t v, int pair) const {
  const auto& code = codes_[c];
  int t = code.slot[pair];
  if (t == kFree) return v;
  if (t == kNone) return std::nullopt;
  std::uint64_t d = (v / code.mul[t]) % (static_cast<std::uint64_t>(code.req[t]) + 1);
  if (d < static_cast<std::uint64_t>(code.req[t])) return v + code.mul[t];
  if (code.star[t]) return v;
  return std::nullopt;
}

TypeEngine::StateSets TypeEngine::successor(const StateSets& s, const Kind& k) const {
  StateSets out(codes_.size());
  for (std::size_t c = 0; c < codes_.size(); ++c) {
    const auto& code = codes_[c];
    auto& dst = out[c];
    for (auto v : s[c]) {
      if (k.free[c]) dst.push_back(v);
      for (int t : k.moves[c]) {
        std::uint64_t d = (v / code.mul[t]) % (static_cast<std::uint64_t>(code.req[t]) + 1);
        if (d < static_cast<std::uint64_t>(code.req[t]))
          dst.push_back(v + code.mul[t]);
        else if (code.star[t])
          dst.push_back(v);
      }
    }
    std::sort(dst.begin(), dst.end());
    dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
  }
  return out;
}

int TypeEngine::intern(StateSets sets, int parent, int via) {
  std::vector<std::uint64_t> key;
  for (const auto& s : sets) {
    key.push_back(s.size());
    key.insert(key.end(), s.begin(), s.end());
  }
  auto [it, fresh] = state_index_.emplace(std::move(key), static_cast<int>(states_.size()));
  if (!fresh) return it->second;
  if (states_.size() >= opts_.max_states) throw PreconditionError("type automaton exceeds the state cap");
  states_.push_back({std::move(sets), parent, via, 0});
  return it->second;
}

void TypeEngine::add_kinds_for(int tuple) {
  const auto& p = *p_;
  const auto& tt = registry_.tuple(tuple);
  for (int x_adj = 0; x_adj < p.nin(); ++x_adj) {
    Bits b(p.nout());
    for (int y = 0; y < p.nout(); ++y)
      for (int a : tt.type.members())
        if (p.edge_ok(p.pair(tt.x, a), p.pair(x_adj, y))) {
          b.set(y);
          break;
        }
    auto key = std::make_pair(x_adj, b);
    if (kind_index_.count(key)) continue;
    Kind k;
    k.x_adj = x_adj;
    k.b = b;
    k.rep_tuple = tuple;
    for (const auto& code : codes_) {
      std::vector<int> moves;
      char fr = 0;
      for (int y : b.members()) {
        int q = p.pair(x_adj, y);
        if (code.slot[q] == kFree)
          fr = 1;
        else if (code.slot[q] >= 0)
          moves.push_back(code.slot[q]);
      }
      k.moves.push_back(std::move(moves));
      k.free.push_back(fr);
    }
    kind_index_.emplace(key, static_cast<int>(kinds_.size()));
    kinds_.push_back(std::move(k));
  }
}

void TypeEngine::expand_pending() {
  for (;;) {
    std::vector<std::pair<int, int>> work;
    for (std::size_t s = 0; s < states_.size(); ++s) {
      for (std::size_t k = states_[s].kinds_done; k < kinds_.size(); ++k)
        work.push_back({static_cast<int>(s), static_cast<int>(k)});
      states_[s].kinds_done = kinds_.size();
    }
    if (work.empty()) return;
    std::vector<StateSets> succ(work.size());
    const long long n = static_cast<long long>(work.size());
    if (opts_.parallel) {
#pragma omp parallel for schedule(dynamic, 16)
      for (long long i = 0; i < n; ++i) succ[i] = successor(states_[work[i].first].sets, kinds_[work[i].second]);
    } else {
      for (long long i = 0; i < n; ++i) succ[i] = successor(states_[work[i].first].sets, kinds_[work[i].second]);
    }
    for (std::size_t i = 0; i < work.size(); ++i) intern(std::move(succ[i]), work[i].first, work[i].second);
  }
}

Bits TypeEngine::one_pole_type(const StateSets& s, int x) const {
  const auto& p = *p_;
  Bits t(p.nout());
  for (std::size_t c = 0; c < codes_.size(); ++c) {
    const auto& code = codes_[c];
    const auto& set = s[c];
    if (set.empty()) continue;
    const bool has_full = std::binary_search(set.begin(), set.end(), code.full);
    for (int y = 0; y < p.nout(); ++y) {
      if (t.test(y)) continue;
      int slot = code.slot[p.pair(x, y)];
      bool ok = false;
      if (slot == kFree)
        ok = has_full;
      else if (slot >= 0)
        ok = std::binary_search(set.begin(), set.end(), code.full - code.mul[slot]) || (code.star[slot] && has_full);
      if (ok) t.set(y);
    }
  }
  return t;
}

bool TypeEngine::good(const StateSets& s) const {
  for (std::size_t c = 0; c < codes_.size(); ++c)
    if (std::binary_search(s[c].begin(), s[c].end(), codes_[c].full)) return true;
  return false;
}

Bits TypeEngine::two_pole_type(const StateSets& s, int xl, int xr) const {
  const auto& p = *p_;
  const int k = p.nout();
  Bits t(k * k);
  for (std::size_t c = 0; c < codes_.size(); ++c) {
    const auto& code = codes_[c];
    for (auto v : s[c]) {
      // Only profiles at most two units short of full can complete with two poles.
      int deficit = 0;
      for (std::size_t e = 0; e < code.pair.size() && deficit <= 2; ++e)
        deficit += code.req[e] - static_cast<int>((v / code.mul[e]) % (static_cast<std::uint64_t>(code.req[e]) + 1));
      if (deficit > 2) continue;
      for (int yl = 0; yl < k; ++yl) {
        auto v1 = apply_pair(static_cast<int>(c), v, p.pair(xl, yl));
        if (!v1) continue;
        for (int yr = 0; yr < k; ++yr) {
          auto v2 = apply_pair(static_cast<int>(c), *v1, p.pair(xr, yr));
          if (v2 && *v2 == code.full) t.set(yl * k + yr);
        }
      }
    }
  }
  return t;
}

std::vector<std::pair<int, int>> TypeEngine::state_children(int state) const {
  std::vector<std::pair<int, int>> out;
  for (int s = state; states_[s].parent >= 0; s = states_[s].parent) {
    const auto& k = kinds_[states_[s].via];
    out.push_back({k.rep_tuple, k.x_adj});
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::optional<InvalidWitness> TypeEngine::run(int iteration_base) {
  iteration_ = std::max(iteration_, iteration_base);
  for (;;) {
    while (tuples_kinded_ < registry_.size()) add_kinds_for(tuples_kinded_++);
    expand_pending();
    const int before = registry_.size();
    for (; harvested_ < states_.size(); ++harvested_) {
      const int s = static_cast<int>(harvested_);
      const auto& sets = states_[s].sets;
      if (!good(sets)) return InvalidWitness{0, state_children(s), 0, iteration_};
      for (int x = 0; x < p_->nin(); ++x) {
        Bits t = one_pole_type(sets, x);
        if (t.none()) return InvalidWitness{1, state_children(s), x, iteration_};
        Provenance prov;
        prov.kind = Provenance::Kind::VirtualTree;
        prov.iteration = iteration_;
        prov.children = state_children(s);
        registry_.add({std::move(t), x}, std::move(prov));
      }
    }
    if (registry_.size() == before) break;
    ++iteration_;
  }
  return std::nullopt;
}

const std::vector<BehaviorInfo>& TypeEngine::behaviors() {
  const int nin = p_->nin();
  for (; behaviors_done_ < states_.size(); ++behaviors_done_) {
    const int s = static_cast<int>(behaviors_done_);
    for (int xl = 0; xl < nin; ++xl)
      for (int xr = 0; xr < nin; ++xr) {
        NodeBehavior b{two_pole_type(states_[s].sets, xl, xr), xl, xr};
        if (behavior_index_.count(b)) continue;
        behavior_index_.emplace(b, static_cast<int>(behaviors_.size()));
        behaviors_.push_back({std::move(b), PathNodeRep{state_children(s), xl, xr}});
      }
  }
  return behaviors_;
}

ComputeTypesResult compute_types(const NodeEdgeLFL& p, const TypeRegistry& seed, const ComputeTypesOptions& opts) {
  TypeEngine engine(p, opts);
  for (int i = 0; i < seed.size(); ++i) engine.add_tuple(seed.tuple(i), seed.provenance(i));
  ComputeTypesResult r;
  r.invalid = engine.run();
  r.registry = engine.registry();
  r.iterations = engine.iterations();
  r.states = engine.state_count();
  return r;
}

}  // namespace lfl
