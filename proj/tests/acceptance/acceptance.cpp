// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lfl/classify.hpp"
#include "lfl/reduce.hpp"
#include "lfl/sim.hpp"
#include "lfl/trees.hpp"
#include "lfl/types.hpp"
#include "oracles.hpp"

using namespace lfl;
using namespace lfl::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Bits random_bits(int width, Rng& rng, bool nonempty = true) {
  Bits b(width);
  for (int i = 0; i < width; ++i)
    if (rng() % 2) b.set(i);
  if (nonempty && b.none()) b.set(static_cast<int>(rng() % static_cast<std::uint64_t>(width)));
  return b;
}

NodeEdgeLFL random_problem(int nin, int nout, Rng& rng) {
  NodeEdgeLFL p;
  std::vector<std::string> in, out;
  for (int i = 0; i < nin; ++i) in.push_back("i" + std::to_string(i));
  for (int i = 0; i < nout; ++i) out.push_back("o" + std::to_string(i));
  p.sigma_in = Alphabet(in);
  p.sigma_out = Alphabet(out);
  const int pairs = nin * nout;
  const int configs = 1 + static_cast<int>(rng() % 4);
  for (int c = 0; c < configs; ++c) {
    std::vector<NodeConfigEntry> entries;
    const int len = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < len; ++j)
      entries.push_back({static_cast<int>(rng() % pairs), static_cast<int>(rng() % 3), rng() % 2 == 0});
    p.node_configs.push_back(canonical_node_config(entries));
  }
  for (int a = 0; a < pairs; ++a)
    for (int b = a; b < pairs; ++b)
      if (rng() % 5 < 3) p.edge_configs.push_back({a, b});
  p.finalize();
  return p;
}

VirtualTree random_vt(int poles, int m, const NodeEdgeLFL& p, Rng& rng) {
  VirtualTree vt;
  vt.poles = poles;
  vt.x = static_cast<int>(rng() % p.nin());
  vt.x_right = static_cast<int>(rng() % p.nin());
  for (int i = 0; i < m; ++i)
    vt.incoming.push_back(
        {static_cast<int>(rng() % p.nin()), static_cast<int>(rng() % p.nin()), random_bits(p.nout(), rng)});
  return vt;
}

// Mostly a long spine with occasional branches back to a random earlier node.
TreeInstance chain_tree(int n, Rng& rng) {
  std::vector<std::array<int, 2>> edges;
  for (int i = 1; i < n; ++i) {
    const int parent = rng() % 10 == 0 ? static_cast<int>(rng() % static_cast<std::uint64_t>(i)) : i - 1;
    edges.push_back({parent, i});
  }
  return TreeInstance::from_edges(n, edges);
}

TreeInstance shaped_tree(int n, int shape, Rng& rng) {
  switch (shape % 5) {
    case 0:
      return random_tree(n, rng);
    case 1:
      return chain_tree(n, rng);
    case 2:
      return caterpillar_tree(std::max(1, n / 3), 2);
    case 3:
      return path_tree(n);
    default:
      return broom_tree(std::max(2, n / 2), std::max(1, n - n / 2));
  }
}

std::vector<TreeInstance> trees_with_inputs(int max_n, int nin) {
  std::vector<TreeInstance> all;
  for (const auto& t : nonisomorphic_trees_up_to(max_n)) {
    int total = 1;
    for (int i = 0; i < t.n(); ++i) total *= nin;
    for (int code = 0; code < total; ++code) {
      TreeInstance u = t;
      std::vector<int> in(t.n());
      int c = code;
      for (auto& x : in) {
        x = c % nin;
        c /= nin;
      }
      set_node_inputs(u, in);
      u.fill_half_from_nodes();
      all.push_back(std::move(u));
    }
  }
  return all;
}

std::optional<Labeling> oracle_radius_solution(const TreeInstance& t, const RadiusLFL& p) {
  std::optional<Labeling> found;
  for_each_word(t.n(), p.nout(), [&](const std::vector<int>& s) {
    if (!verify_radius(t, s, p).valid) return false;
    found = s;
    return true;
  });
  return found;
}

// Plain recursive rooted encoding of the depth-limited view below v.
std::string view_code(const TreeInstance& t, int v, int parent, int depth) {
  std::vector<std::string> kids;
  if (depth > 0)
    for (auto [w, e] : t.adj[v])
      if (w != parent) kids.push_back(view_code(t, w, v, depth - 1));
  std::sort(kids.begin(), kids.end());
  std::string s = "(";
  for (const auto& k : kids) s += k;
  return s + ")";
}

// ---------------------------------------------------------------------------

Outcome gadget_node_counts() {
  Outcome o;
  Rng rng(101);
  int checked = 0;
  while (checked < 50) {
    const double alpha = 0.3 + 0.4 * static_cast<double>(rng() % 1000) / 1000.0;
    int g = 4 + static_cast<int>(rng() % 60);
    while (g < 400 && (!gadget_g_valid(alpha, g) || gadget_max_length(alpha, g) < 2)) ++g;
    if (g >= 400) continue;
    const long long max_len = std::min<long long>(gadget_max_length(alpha, g), 200);
    const int L = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_len - 1));
    const int pad = rng() % 2 ? 0 : 3 + static_cast<int>(rng() % 20);
    auto inst = generate_gadget_instance(alpha, g, L, pad);
    ++checked;
    // Cut the path edges: every path node keeps a component of g + 1 nodes, v_L also the padding.
    std::set<std::pair<int, int>> path_edges;
    for (int i = 0; i + 1 < L; ++i) {
      path_edges.insert({inst.path[i], inst.path[i + 1]});
      path_edges.insert({inst.path[i + 1], inst.path[i]});
    }
    std::vector<int> comp(inst.tree.n(), -1);
    bool sizes_ok = true;
    for (int i = 0; i < L; ++i) {
      std::vector<int> stack{inst.path[i]};
      comp[inst.path[i]] = i;
      int size = 0;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++size;
        for (auto [w, e] : inst.tree.adj[v])
          if (comp[w] < 0 && !path_edges.count({v, w})) {
            comp[w] = i;
            stack.push_back(w);
          }
      }
      const int want = g + 1 + (i == L - 1 ? pad : 0);
      if (size != want) sizes_ok = false;
    }
    const bool ok = sizes_ok && inst.unpadded_nodes() == L + L * g && inst.tree.n() == L * (g + 1) + pad;
    if (!ok) {
      o.pass = false;
      std::ostringstream s;
      s << "mismatch at alpha=" << alpha << " g=" << g << " L=" << L << " pad=" << pad;
      o.detail = s.str();
      return o;
    }
  }
  o.detail = std::to_string(checked) + " instances";
  return o;
}

Outcome indistinguishability() {
  Outcome o;
  auto pr = indistinguishability_pair(4096, 0.5);
  const bool sizes = pr.g1.tree.n() == 4096 && pr.g2.tree.n() == 4096 && pr.radius == pr.g1.length - 2;
  const bool same_view =
      view_code(pr.g1.tree, pr.v1, -1, pr.radius) == view_code(pr.g2.tree, pr.v2, -1, pr.radius) && pr.views_equal;
  const bool outputs_differ = pr.g1.required[pr.v1] != pr.g2.required[pr.v2];
  auto a = pr.g1.required, b = pr.g2.required;
  a[pr.v1] ^= 1;
  b[pr.v2] ^= 1;
  const bool rejects = !check_gadget_labeling(pr.g1, a).valid && !check_gadget_labeling(pr.g2, b).valid &&
                       check_gadget_labeling(pr.g1, pr.g1.required).valid &&
                       check_gadget_labeling(pr.g2, pr.g2.required).valid;
  o.pass = sizes && same_view && outputs_differ && rejects;
  o.detail = "g=" + std::to_string(pr.g1.g) + " L=" + std::to_string(pr.g1.length) +
             " radius=" + std::to_string(pr.radius) + (same_view ? "" : " views differ") +
             (outputs_differ ? "" : " outputs equal") + (rejects ? "" : " flip accepted");
  return o;
}

Outcome type_engine_oracle() {
  Outcome o;
  Rng rng(303);
  std::vector<NodeEdgeLFL> problems;
  for (const char* name : {"mis", "mis-paper", "mis-strict", "2col", "3col"}) {
    auto p = node_edge_of(fixture(name));
    if (p.nin() == 1 && p.nout() <= 3) problems.push_back(p);
  }
  for (int i = 0; i < 30; ++i) problems.push_back(random_problem(1, 1 + i % 3, rng));
  long long small = 0, large = 0, mismatches = 0;
  for (const auto& p : problems) {
    std::vector<Incoming> pool;
    for (int t = 0; t < (1 << p.nout()); ++t) {
      Bits b(p.nout());
      for (int i = 0; i < p.nout(); ++i)
        if (t >> i & 1) b.set(i);
      pool.push_back({0, 0, b});
    }
    std::vector<Incoming> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
      for (int poles = 0; poles <= 2; ++poles) {
        VirtualTree vt;
        vt.poles = poles;
        vt.incoming = cur;
        const Bits want = oracle_vt_type(vt, p);
        if (virtual_tree_type(vt, p) != want || oracle_vt_type_dp(vt, p) != want) ++mismatches;
        ++small;
      }
      if (cur.size() == 4) return;
      for (std::size_t i = from; i < pool.size(); ++i) {
        cur.push_back(pool[i]);
        rec(i);
        cur.pop_back();
      }
    };
    rec(0);
  }
  for (int i = 0; i < 1000; ++i) {
    const int nout = 2 + i % 2;
    auto p = random_problem(1 + static_cast<int>(rng() % 2), nout, rng);
    const int m = nout == 2 ? 5 + static_cast<int>(rng() % 3) : 5;
    auto vt = random_vt(static_cast<int>(rng() % 3), m, p, rng);
    if (virtual_tree_type(vt, p) != oracle_vt_type(vt, p)) ++mismatches;
    ++large;
  }
  // Far beyond enumeration, against the capped-count dynamic program.
  long long huge = 0;
  for (int i = 0; i < 1000; ++i) {
    auto p = random_problem(1 + static_cast<int>(rng() % 2), 2 + static_cast<int>(rng() % 2), rng);
    auto vt = random_vt(static_cast<int>(rng() % 3), 8 + static_cast<int>(rng() % 33), p, rng);
    if (virtual_tree_type(vt, p) != oracle_vt_type_dp(vt, p)) ++mismatches;
    ++huge;
  }
  o.pass = mismatches == 0;
  o.detail = std::to_string(small) + " exhaustive small, " + std::to_string(large) + " exhaustive random, " +
             std::to_string(huge) + " large random, " + std::to_string(mismatches) + " mismatches";
  return o;
}

Outcome shrink_and_pump() {
  Outcome o;
  Rng rng(404);
  int shrink_ok = 0, pump_ok = 0;
  for (int i = 0; i < 500; ++i) {
    auto p = random_problem(1 + static_cast<int>(rng() % 2), 2 + static_cast<int>(rng() % 2), rng);
    const auto bound = static_cast<int>(virtual_tree_size_bound(p));
    auto vt = random_vt(static_cast<int>(rng() % 3), bound + 1 + static_cast<int>(rng() % 20), p, rng);
    auto sh = shrink_virtual_tree(vt, p.max_config_size());
    const Bits full = oracle_vt_type_dp(vt, p);
    if (static_cast<int>(sh.incoming.size()) <= bound && oracle_vt_type_dp(sh, p) == full &&
        virtual_tree_type(vt, p) == full)
      ++shrink_ok;
  }
  std::vector<NodeEdgeLFL> problems{fixture("mis").node_edge, fixture("2col").node_edge, fixture("mis-paper").node_edge};
  for (int i = 0; i < 200; ++i) {
    const NodeEdgeLFL p = i % 2 ? problems[static_cast<std::size_t>(i / 2) % problems.size()]
                                : random_problem(1 + static_cast<int>(rng() % 2), 2 + static_cast<int>(rng() % 2), rng);
    const int k = p.nout();
    std::vector<NodeBehavior> pool;
    const int kinds = 2 + static_cast<int>(rng() % 3);
    for (int j = 0; j < kinds; ++j)
      pool.push_back({random_bits(k * k, rng), static_cast<int>(rng() % p.nin()), static_cast<int>(rng() % p.nin())});
    const auto states = static_cast<int>(count_path_states(pool, p));
    std::vector<NodeBehavior> path;
    const int len = states + 1 + static_cast<int>(rng() % 6);
    for (int j = 0; j < len; ++j) path.push_back(pool[rng() % pool.size()]);
    auto pumped = pump_virtual_path(path, 3 * len, p);
    const auto a = compress_path_type(path, p), b = compress_path_type(pumped, p);
    const Bits want = oracle_path_type_dp(path, p);
    if (static_cast<int>(pumped.size()) >= 3 * len && a == b && a.type == want &&
        oracle_path_type_dp(pumped, p) == want)
      ++pump_ok;
  }
  o.pass = shrink_ok == 500 && pump_ok == 200;
  o.detail = "shrink " + std::to_string(shrink_ok) + "/500, pump " + std::to_string(pump_ok) + "/200";
  return o;
}

Outcome compute_types_soundness() {
  Outcome o;
  long long cuts = 0, missing = 0;
  int invalid = 0;
  const auto trees = nonisomorphic_trees_up_to(9);
  for (const char* name : {"mis-paper", "mis-strict", "3col"}) {
    auto p = node_edge_of(fixture(name));
    auto r = compute_types(p);
    if (r.invalid) ++invalid;
    for (const auto& t0 : trees) {
      auto t = with_uniform_halves(t0);
      for_each_rooted_cut(t, [&](int root, int half) {
        ++cuts;
        if (!r.registry.find({subtree_type(t, root, {half}, p), t.half_inputs[half]})) ++missing;
      });
    }
  }
  o.pass = missing == 0 && invalid == 0;
  o.detail = std::to_string(trees.size()) + " trees, " + std::to_string(cuts) + " cuts, " +
             std::to_string(missing) + " missing, " + std::to_string(invalid) + " invalid";
  return o;
}

Outcome formalism_round_trips() {
  Outcome o;
  int discrepancies = 0;
  long long labelings = 0, instances = 0;
  // Partial-order problem against its eliminated form and its node-edge form.
  auto po = fixture("3col-po").radius;
  auto plain = eliminate_auxiliary(po).problem;
  auto po_pl = run_pipeline(po);
  const auto& po_ne = po_pl.node_edge.problem;
  for (const auto& t0 : nonisomorphic_trees_up_to(7)) {
    TreeInstance t = t0;
    set_uniform_inputs(t, 0);
    t.fill_half_from_nodes();
    std::optional<Labeling> first;
    for_each_word(t.n(), po.nout(), [&](const std::vector<int>& s) {
      const bool v = verify_radius(t, s, po).valid;
      if (v != verify_radius(t, s, plain).valid) ++discrepancies;
      if (v && !first) first = s;
      ++labelings;
      return false;
    });
    auto ne = brute_force_solve(t, po_ne);
    if (first.has_value() != ne.has_value()) ++discrepancies;
    if (first) {
      auto half = pipeline_forward(po_pl, t, *first, po);
      if (!verify_node_edge(t, half, po_ne).valid) ++discrepancies;
      if (pipeline_backward(po_pl, t, half, po) != *first) ++discrepancies;
    }
    if (ne && !verify_radius(t, pipeline_backward(po_pl, t, *ne, po), po).valid) ++discrepancies;
    ++instances;
  }
  // Radius 2 to radius 1 to node-edge.
  auto d = fixture("dist2-mark").radius;
  auto pl = run_pipeline(d);
  const auto& r1 = pl.stages.back().radius;
  const auto& red = *pl.stages.back().reduction;
  const auto& ne = pl.node_edge.problem;
  for (const auto& t : trees_with_inputs(7, d.nin())) {
    auto sol = oracle_radius_solution(t, d);
    auto dp = solve_radius1(t, r1);
    auto half = brute_force_solve(t, ne);
    if (sol.has_value() != dp.has_value() || sol.has_value() != half.has_value()) ++discrepancies;
    if (sol) {
      auto fwd = pipeline_forward(pl, t, *sol, d);
      if (!verify_node_edge(t, fwd, ne).valid) ++discrepancies;
      if (pipeline_backward(pl, t, fwd, d) != *sol) ++discrepancies;
    }
    if (dp) {
      Labeling projected(t.n());
      for (int v = 0; v < t.n(); ++v)
        projected[v] = red.base_output[*red.problem.sigma_out.find(r1.sigma_out.name((*dp)[v]))];
      if (!verify_radius(t, projected, d).valid) ++discrepancies;
    }
    if (half && !verify_radius(t, pipeline_backward(pl, t, *half, d), d).valid) ++discrepancies;
    ++instances;
  }
  o.pass = discrepancies == 0;
  o.detail = std::to_string(instances) + " instances, " + std::to_string(labelings) + " labelings, " +
             std::to_string(discrepancies) + " discrepancies";
  return o;
}

Outcome classifier_solver_consistency() {
  Outcome o;
  std::ostringstream s;
  for (const char* name : {"mis", "mis-paper", "mis-strict", "mis-lfl", "2col", "3col", "3col-po", "dist2-mark",
                           "empty-edges"}) {
    const auto prob = fixture(name);
    std::optional<Pipeline> pl;
    NodeEdgeLFL p = prob.node_edge;
    if (prob.formalism != Formalism::NodeEdge) {
      pl = run_pipeline(prob.radius);
      p = pl->node_edge.problem;
    }
    auto c = classify_problem(p);
    if (c.kind == VerdictKind::Unsolvable) {
      const bool small = c.witness && c.witness->tree.n() <= 12;
      const bool unsolvable = c.witness && !brute_force_solve(c.witness->tree, p).has_value();
      if (!small || !unsolvable) o.pass = false;
      s << name << " witness " << (c.witness ? c.witness->tree.n() : -1) << (unsolvable ? " unsolvable; " : " SOLVABLE; ");
      continue;
    }
    Rng rng(707);
    std::vector<TreeInstance> trees;
    for (int i = 0; i < 200; ++i) {
      const double u = static_cast<double>(rng() % 10000) / 9999.0;
      const int n = std::clamp(static_cast<int>(std::lround(std::pow(10.0, 1.0 + 3.0 * u))), 2, 10000);
      auto t = shaped_tree(i < 5 ? 10000 : n, i, rng);
      std::vector<int> in(t.n(), 0);
      if (p.nin() > 1 && prob.formalism != Formalism::NodeEdge)
        for (auto& x : in) x = static_cast<int>(rng() % static_cast<std::uint64_t>(prob.radius.nin()));
      set_node_inputs(t, in);
      t.fill_half_from_nodes();
      trees.push_back(std::move(t));
    }
    auto opts = solve_options_for(c);
    auto reports = solve_batch(trees, p, opts);
    int good = 0;
    for (std::size_t i = 0; i < trees.size(); ++i) {
      bool ok = reports[i].valid && reports[i].labeling && verify_node_edge(trees[i], *reports[i].labeling, p).valid;
      if (ok && pl) ok = verify_radius(trees[i], pipeline_backward(*pl, trees[i], *reports[i].labeling, prob.radius),
                                       prob.radius)
                             .valid;
      good += ok;
    }
    if (good != 200) o.pass = false;
    s << name << " " << verdict_line(c) << " " << good << "/200; ";
  }
  o.detail = s.str();
  return o;
}

Outcome decomposition_accounting() {
  Outcome o;
  constexpr int kEll = 3;
  // one rake round plus 2 ell + log* n compress rounds per layer, log* n <= 4 here
  constexpr double kC = 2 * kEll + 6;
  Rng rng(808);
  int invalid = 0, trees = 0;
  std::map<std::string, std::map<int, double>> worst;  // mode -> n -> max ratio
  for (int i = 0; i < 100; ++i) {
    const int n = i % 3 == 0 ? 100 : i % 3 == 1 ? 1000 : 10000;
    auto t = shaped_tree(n, i / 3, rng);
    set_uniform_inputs(t, 0);
    const int nn = t.n();
    ++trees;
    for (int ell : {2, kEll}) {
      for (int k = 1; k <= 3; ++k) {
        auto d = rc_decompose_poly(t, ell, k);
        if (!validate_decomposition(t, d).ok) ++invalid;
        if (ell == kEll) {
          double& w = worst["poly k=" + std::to_string(k)][n];
          w = std::max(w, static_cast<double>(d.rounds()) / (k * std::pow(nn, 1.0 / k)));
        }
      }
      auto lg = rc_decompose_log(t, ell);
      if (!validate_decomposition(t, lg).ok) ++invalid;
      if (ell == kEll) {
        double& w = worst["log"][n];
        w = std::max(w, static_cast<double>(lg.rounds()) / std::log2(static_cast<double>(nn)));
      }
    }
  }
  std::ostringstream s;
  s.precision(3);
  s << trees << " trees, " << invalid << " invalid, c=" << kC << ", worst ratios:";
  for (const auto& [mode, per_n] : worst) {
    s << " [" << mode;
    for (auto [n, r] : per_n) {
      s << " n=" << n << ":" << r;
      if (r > kC) o.pass = false;
    }
    s << "]";
    // the ratio may not grow with n
    if (per_n.rbegin()->second > per_n.begin()->second + 1e-9) o.pass = false;
  }
  if (invalid) o.pass = false;
  o.detail = s.str();
  return o;
}

Outcome solver_agreement() {
  Outcome o;
  long long checked = 0, disagreements = 0;
  for (const char* name : {"mis", "mis-paper", "mis-strict", "mis-lfl", "2col", "3col", "3col-po", "dist2-mark",
                           "empty-edges"}) {
    const auto prob = fixture(name);
    const auto p = node_edge_of(prob);
    std::vector<TreeInstance> trees;
    if (prob.formalism != Formalism::NodeEdge && prob.radius.nin() > 1)
      trees = trees_with_inputs(8, prob.radius.nin());
    else
      for (const auto& t : nonisomorphic_trees_up_to(8)) trees.push_back(with_uniform_halves(t));
    for (const auto& t : trees) {
      auto a = solve_diameter(t, p);
      auto b = brute_force_solve(t, p);
      if (a.has_value() != b.has_value() || (a && !verify_node_edge(t, *a, p).valid)) ++disagreements;
      ++checked;
    }
  }
  o.pass = disagreements == 0;
  o.detail = std::to_string(checked) + " instances, " + std::to_string(disagreements) + " disagreements";
  return o;
}

struct Criterion {
  const char* name;
  double limit_seconds;  // 0: no limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"gadget node-count identity", 10, gadget_node_counts},
      {"lower-bound indistinguishability", 30, indistinguishability},
      {"type-engine oracle equivalence", 300, type_engine_oracle},
      {"shrink and pump invariance", 0, shrink_and_pump},
      {"compute types soundness", 600, compute_types_soundness},
      {"formalism equivalence round trips", 0, formalism_round_trips},
      {"classifier-solver consistency", 300, classifier_solver_consistency},
      {"decomposition validity and accounting", 0, decomposition_accounting},
      {"solver agreement", 0, solver_agreement},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = seconds_since(t0);
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      out.pass = false;
      out.detail += " (over the time limit)";
    }
    failed += !out.pass;
    std::printf("%s %s: %s [%.2fs]\n", out.pass ? "PASS" : "FAIL", c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
