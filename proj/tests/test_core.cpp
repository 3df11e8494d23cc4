#include <algorithm>
#include <random>

#include "doctest.h"
#include "lfl/core.hpp"
#include "lfl/io.hpp"
#include "lfl/trees.hpp"
#include "support.hpp"

using namespace lfl;
using lfl::testing::fixture;

namespace {

PairCounts counts_of(const NodeEdgeLFL& p, std::initializer_list<const char*> outs) {
  PairCounts c;
  for (const char* o : outs) c[p.pair(0, p.sigma_out.index(o))]++;
  return c;
}

int sym(const NodeEdgeLFL& p, const char* s) { return p.pair(0, p.sigma_out.index(s)); }

}  // namespace

TEST_CASE("node configuration matching on the MIS table") {
  auto p = fixture("mis-paper").node_edge;
  const NodeConfig* mstar = nullptr;
  const NodeConfig* pconf = nullptr;
  for (const auto& c : p.node_configs) (c.size() == 1 ? mstar : pconf) = &c;
  REQUIRE(mstar);
  REQUIRE(pconf);
  CHECK(match_node_config(counts_of(p, {"M", "M", "M"}), *mstar));
  CHECK(match_node_config(counts_of(p, {"P"}), *pconf));
  CHECK_FALSE(match_node_config(counts_of(p, {"O", "O"}), *pconf));
  CHECK(match_node_config(counts_of(p, {"P", "P", "O"}), *pconf));
  CHECK_FALSE(match_node_config(counts_of(p, {"M", "P"}), *pconf));
  CHECK(match_node_config(PairCounts{}, *mstar));
}

TEST_CASE("node configuration matching is invariant under element order") {
  auto p = fixture("mis-paper").node_edge;
  std::vector<NodeConfigEntry> entries{{sym(p, "O"), 0, true}, {sym(p, "P"), 1, false}, {sym(p, "P"), 0, true}};
  NodeConfig a = canonical_node_config(entries);
  std::reverse(entries.begin(), entries.end());
  NodeConfig b = canonical_node_config(entries);
  CHECK(a == b);
  REQUIRE(a.size() == 2);
  CHECK(a[0].count + a[1].count == 1);
}

TEST_CASE("edge configurations of the MIS table") {
  auto p = fixture("mis-paper").node_edge;
  CHECK(match_edge_config(sym(p, "P"), sym(p, "M"), p));
  CHECK(match_edge_config(sym(p, "M"), sym(p, "P"), p));
  CHECK_FALSE(match_edge_config(sym(p, "O"), sym(p, "M"), p));
  CHECK(match_edge_config(sym(p, "O"), sym(p, "O"), p));
  CHECK(match_edge_config(sym(p, "M"), sym(p, "M"), p));
  auto s = fixture("mis-strict").node_edge;
  CHECK_FALSE(match_edge_config(sym(s, "M"), sym(s, "M"), s));
}

TEST_CASE("verify_node_edge on tiny MIS instances") {
  auto p = fixture("mis-paper").node_edge;
  auto t = path_tree(2);
  set_uniform_inputs(t);
  int P = p.sigma_out.index("P"), M = p.sigma_out.index("M");
  auto v = verify_node_edge(t, {P, P}, p);
  CHECK_FALSE(v.valid);
  bool edge_flagged = std::any_of(v.violations.begin(), v.violations.end(),
                                  [](const Violation& x) { return x.kind == Violation::Kind::Edge; });
  CHECK(edge_flagged);
  CHECK(verify_node_edge(t, {P, M}, p).valid);
  // Exactly the labelings the oracle finds valid are accepted.
  int valid = 0;
  lfl::testing::for_each_word(2, 3, [&](const std::vector<int>& s) {
    valid += verify_node_edge(t, s, p).valid;
    return false;
  });
  CHECK(valid == 3);  // (P,M), (M,P), (M,M)
  auto single = path_tree(1);
  set_uniform_inputs(single);
  CHECK(verify_node_edge(single, {}, p).valid);
  CHECK_THROWS_AS(verify_node_edge(t, {P}, p), MalformedInput);
}

TEST_CASE("valid node-edge labelings decompose into passing local checks") {
  auto p = fixture("mis-strict").node_edge;
  auto t = star_tree(3);
  set_uniform_inputs(t);
  lfl::testing::for_each_word(6, 3, [&](const std::vector<int>& s) {
    if (!verify_node_edge(t, s, p).valid) return false;
    for (int v = 0; v < t.n(); ++v) {
      auto c = node_pairs(t, s, v, p);
      CHECK(std::any_of(p.node_configs.begin(), p.node_configs.end(),
                        [&](const NodeConfig& nc) { return match_node_config(c, nc); }));
    }
    for (int e = 0; e < t.m(); ++e) CHECK(p.edge_ok(s[2 * e], s[2 * e + 1]));
    return false;
  });
}

TEST_CASE("radius matching on MIS-as-LFL") {
  auto p = fixture("mis-lfl").radius;
  int zero = p.sigma_out.index("0"), one = p.sigma_out.index("1");
  int c1 = 0, c0 = 1;
  REQUIRE(p.configs[c1].name == "1-center");
  auto star = star_tree(3);
  set_uniform_inputs(star);
  Labeling out{one, zero, zero, zero};
  auto w = match_radius_configuration(star, out, 0, p, c1);
  REQUIRE(w.has_value());
  CHECK((*w)[0] == p.configs[c1].center);
  auto single = path_tree(1);
  set_uniform_inputs(single);
  CHECK_FALSE(match_radius_configuration(single, {zero}, 0, p, c0).has_value());
  CHECK(verify_radius(single, {one}, p).valid);
  auto path3 = path_tree(3);
  set_uniform_inputs(path3);
  auto bad = verify_radius(path3, {zero, zero, zero}, p);
  CHECK_FALSE(bad.valid);
  CHECK(bad.violations.size() == 3);
  CHECK(verify_radius(path3, {zero, one, zero}, p).valid);
  // Only maximal independent sets pass on the 3-path.
  int valid = 0;
  lfl::testing::for_each_word(3, 2, [&](const std::vector<int>& s) {
    valid += verify_radius(path3, s, p).valid;
    return false;
  });
  CHECK(valid == 2);  // {middle} and {both ends}
}

TEST_CASE("radius matching with wildcards") {
  auto p = fixture("3col-po").radius;
  int R = p.sigma_out.index("R"), G = p.sigma_out.index("G"), B = p.sigma_out.index("B");
  auto t = path_tree(3);
  set_uniform_inputs(t);
  Labeling out{G, R, B};
  CHECK(match_radius_configuration(t, out, 1, p, 0).has_value());
  Labeling clash{R, R, B};
  CHECK_FALSE(match_radius_configuration(t, clash, 1, p, 0).has_value());
}

TEST_CASE("all-required configurations match exactly the isomorphic stars") {
  RadiusLFL p;
  p.sigma_in = Alphabet({"·"});
  p.sigma_out = Alphabet({"a", "b"});
  RadiusConfiguration c;
  c.center = 0;
  c.in = {0, 0, 0};
  c.out = {0, 1, 1};
  c.edges = {{0, 1, true}, {0, 2, true}};
  p.configs.push_back(c);
  p.finalize();
  for (int leaves = 0; leaves <= 4; ++leaves) {
    auto t = star_tree(leaves);
    set_uniform_inputs(t);
    lfl::testing::for_each_word(t.n(), 2, [&](const std::vector<int>& s) {
      int bs = 0;
      for (int v = 1; v < t.n(); ++v) bs += s[v] == 1;
      bool iso = s[0] == 0 && leaves == 2 && bs == 2;
      CHECK(match_radius_configuration(t, s, 0, p, 0).has_value() == iso);
      return false;
    });
  }
}

TEST_CASE("configurations are validated at load time") {
  json j = read_json_file(std::string(LFL_FIXTURE_DIR) + "/dist2-mark.json");
  auto& edges = j["configurations"][3]["edges"];
  REQUIRE(edges[0][2] == "required");
  edges[0][2] = "optional";  // required I-M edge now hangs off an optional edge
  CHECK_THROWS_AS(parse_problem(j), MalformedInput);
  auto lenient = parse_problem(j, true).radius;
  CHECK_FALSE(lenient.prepared(3).matchable);
  json far = read_json_file(std::string(LFL_FIXTURE_DIR) + "/mis-lfl.json");
  far["configurations"][1]["edges"] = json::array({json::array({0, 1, "required"}), json::array({1, 2, "optional"}),
                                                   json::array({0, 3, "optional"})});
  CHECK_THROWS_AS(parse_problem(far), MalformedInput);  // node 2 sits at distance 2 > r
}

TEST_CASE("self-loops are accepted but never matched") {
  RadiusLFL p;
  p.sigma_in = Alphabet({"·"});
  p.sigma_out = Alphabet({"a"});
  RadiusConfiguration c;
  c.center = 0;
  c.in = {0};
  c.out = {0};
  c.edges = {{0, 0, true}};
  p.configs.push_back(c);
  p.finalize();
  auto t = path_tree(1);
  set_uniform_inputs(t);
  CHECK_FALSE(verify_radius(t, {0}, p).valid);
  p.configs[0].edges[0].required = false;
  p.finalize();
  CHECK(verify_radius(t, {0}, p).valid);
}

TEST_CASE("eliminate_auxiliary on 3col-po") {
  auto p = fixture("3col-po").radius;
  auto r = eliminate_auxiliary(p);
  CHECK(r.warnings.empty());
  CHECK(r.problem.aux.size() == 0);
  REQUIRE(r.problem.configs.size() == 3);
  for (const auto& c : r.problem.configs) {
    CHECK(c.size() == 3);
    std::vector<int> others;
    for (int w = 0; w < c.size(); ++w)
      if (w != c.center) others.push_back(c.out[w]);
    std::sort(others.begin(), others.end());
    CHECK(others.size() == 2);
    CHECK(others[0] != others[1]);
    CHECK(std::find(others.begin(), others.end(), c.out[c.center]) == others.end());
    for (const auto& e : c.edges) CHECK_FALSE(e.required);
  }
}

TEST_CASE("eliminate_auxiliary copies configurations for required wildcards") {
  RadiusLFL p;
  p.sigma_in = Alphabet({"·"});
  p.sigma_out = Alphabet({"a", "b", "c"});
  p.aux = Alphabet({"ab", "none"});
  p.order = {{0, 3}, {1, 3}};
  RadiusConfiguration c;
  c.center = 0;
  c.in = {0, 0, 0};
  c.out = {2, 3, 4};
  c.edges = {{0, 1, true}, {0, 2, false}};
  p.configs.push_back(c);
  p.finalize();
  auto r = eliminate_auxiliary(p);
  CHECK(r.problem.configs.size() == 2);
  CHECK(r.warnings.size() == 2);  // "none" dominates nothing, once per copy
  for (const auto& cfg : r.problem.configs) CHECK(cfg.size() == 2);

  auto plain = fixture("3col").radius;
  auto same = eliminate_auxiliary(plain);
  CHECK(same.problem.configs.size() == plain.configs.size());
  CHECK(problem_to_json(same.problem)["configurations"] == problem_to_json(plain)["configurations"]);
}

TEST_CASE("poLFL and its eliminated form agree on small trees") {
  auto po = fixture("3col-po").radius;
  auto plain = eliminate_auxiliary(po).problem;
  for (const auto& t0 : nonisomorphic_trees_up_to(5)) {
    TreeInstance t = t0;
    lfl::testing::for_each_word(t.n(), 3, [&](const std::vector<int>& s) {
      CHECK(verify_radius(t, s, po).valid == verify_radius(t, s, plain).valid);
      return false;
    });
  }
}

TEST_CASE("tree enumeration counts") {
  const int expected[] = {1, 1, 1, 2, 3, 6, 11, 23, 47};
  for (int n = 1; n <= 9; ++n) CHECK(nonisomorphic_trees(n).size() == static_cast<std::size_t>(expected[n - 1]));
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    auto t = random_tree(1 + i * 13, rng);
    CHECK_NOTHROW(t.check_tree());
  }
}

TEST_CASE("problem and instance JSON round trip") {
  for (const char* name : {"mis-paper", "3col-po", "dist2-mark", "empty-edges"}) {
    auto p = fixture(name);
    auto again = parse_problem(problem_to_json(p));
    CHECK(problem_to_json(again) == problem_to_json(p));
  }
  auto p = fixture("dist2-mark").radius;
  auto t = path_tree(4);
  set_node_inputs(t, {0, 1, 1, 0});
  auto j = instance_to_json(t, p.sigma_in, false);
  auto t2 = parse_instance(j, p.sigma_in);
  CHECK(t2.node_inputs == t.node_inputs);
  CHECK(t2.half_inputs == t.half_inputs);
  auto jh = instance_to_json(t, p.sigma_in, true);
  CHECK(parse_instance(jh, p.sigma_in).half_inputs == t.half_inputs);
  Labeling sigma{1, 0, 1, 1};
  CHECK(parse_labeling(labeling_to_json(t, sigma, p.sigma_out, false), t, p.sigma_out) == sigma);
  CHECK_THROWS_AS(parse_instance(json::parse(R"({"nodes":[0,1,2],"edges":[[0,1],[1,2],[2,0]]})"), p.sigma_in),
                  MalformedInput);
}

TEST_CASE("dist2-mark accepts exactly the correct labeling") {
  auto p = fixture("dist2-mark").radius;
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto t = random_tree(1 + trial % 7, rng);
    std::vector<int> in(t.n());
    for (auto& x : in) x = static_cast<int>(rng() % 2);
    set_node_inputs(t, in);
    int solutions = 0;
    lfl::testing::for_each_word(t.n(), 2, [&](const std::vector<int>& s) {
      if (!verify_radius(t, s, p).valid) return false;
      ++solutions;
      for (int v = 0; v < t.n(); ++v) {
        // Distance-2 oracle by BFS.
        std::vector<int> d(t.n(), -1);
        std::vector<int> q{v};
        d[v] = 0;
        bool near = false;
        for (std::size_t i = 0; i < q.size(); ++i) {
          int u = q[i];
          if (in[u] == 0) near = true;
          if (d[u] == 2) continue;
          for (auto [w, e] : t.adj[u])
            if (d[w] < 0) {
              d[w] = d[u] + 1;
              q.push_back(w);
            }
        }
        CHECK(s[v] == (near ? 1 : 0));
      }
      return false;
    });
    CHECK(solutions == 1);
  }
}
