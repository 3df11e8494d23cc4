#include <set>

#include "doctest.h"
#include "lfl/sim.hpp"
#include "lfl/trees.hpp"
#include "oracles.hpp"

using namespace lfl;
using namespace lfl::testing;

namespace {

std::vector<TreeInstance> sample_trees(int count, int lo, int hi, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TreeInstance> out;
  for (int i = 0; i < count; ++i) {
    const int n = lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    out.push_back(random_tree(n, rng));
  }
  out.push_back(path_tree(lo));
  out.push_back(star_tree(hi));
  out.push_back(caterpillar_tree(hi / 3 + 1, 2));
  out.push_back(broom_tree(hi / 2 + 1, 4));
  for (auto& t : out) set_uniform_inputs(t, 0);
  return out;
}

// First valid labeling in half-index lexicographic order, by full enumeration.
std::optional<Labeling> oracle_first_labeling(const TreeInstance& t, const NodeEdgeLFL& p) {
  std::optional<Labeling> found;
  for_each_word(2 * t.m(), p.nout(), [&](const std::vector<int>& w) {
    if (verify_node_edge(t, w, p).valid) {
      found = w;
      return true;
    }
    return false;
  });
  return found;
}

}  // namespace

TEST_CASE("gamma and iterated logarithm") {
  CHECK(poly_gamma(100, 4, 1) == 100);
  CHECK(poly_gamma(100, 2, 2) == 10);
  CHECK(poly_gamma(64, 4, 3) == 7);  // 4 * 2^(2/3) = 6.35
  CHECK(log_star(1) == 0);
  CHECK(log_star(2) == 1);
  CHECK(log_star(16) == 3);
  CHECK(log_star(65536) == 4);
  CHECK(log_star(65537) == 5);
}

TEST_CASE("rake and compress decompositions are valid") {
  for (const auto& t : sample_trees(40, 2, 120, 11)) {
    for (int ell : {2, 3, 5}) {
      auto lg = rc_decompose_log(t, ell);
      auto c = validate_decomposition(t, lg);
      CHECK_MESSAGE(c.ok, (c.problems.empty() ? "" : c.problems.front()));
      for (int k = 1; k <= 3; ++k) {
        auto d = rc_decompose_poly(t, ell, k);
        auto cp = validate_decomposition(t, d);
        CHECK_MESSAGE(cp.ok, (cp.problems.empty() ? "" : cp.problems.front()));
        CHECK(d.k <= k);
        for (const auto& path : d.paths) {
          CHECK(static_cast<int>(path.size()) >= ell);
          CHECK(static_cast<int>(path.size()) <= 2 * ell);
        }
      }
    }
  }
}

TEST_CASE("a long path gets a compress layer") {
  auto t = path_tree(100);
  auto d = rc_decompose_poly(t, 4, 2);
  CHECK(validate_decomposition(t, d).ok);
  int compressed = 0;
  for (int v = 0; v < t.n(); ++v) compressed += d.layer[v] == 1;
  CHECK(compressed > 0);
  CHECK_FALSE(d.paths.empty());
  // one rake layer alone cannot clear the path with gamma 10
  CHECK_THROWS_AS(rc_decompose(t, 10, 4, 1), PreconditionError);
}

TEST_CASE("isolated edges rake the lower id first") {
  auto t = path_tree(2);
  auto d = rc_decompose_log(t, 2);
  CHECK(d.key(0) < d.key(1));
  CHECK(validate_decomposition(t, d).ok);
}

TEST_CASE("the validator rejects broken decompositions") {
  auto t = path_tree(30);
  auto d = rc_decompose_poly(t, 3, 2);
  REQUIRE(validate_decomposition(t, d).ok);
  auto bad = d;
  for (int v = 0; v < t.n(); ++v) bad.layer[v] = 0, bad.sublayer[v] = 1, bad.path_of[v] = -1;
  bad.paths.clear();
  CHECK_FALSE(validate_decomposition(t, bad).ok);
  auto small = d;
  small.gamma = 1;
  CHECK_FALSE(validate_decomposition(t, small).ok);
}

TEST_CASE("brute force returns the lexicographically first labeling") {
  for (const char* name : {"mis", "2col", "mis-paper", "empty-edges"}) {
    auto p = fixture(name).node_edge;
    for (const auto& raw : nonisomorphic_trees_up_to(5)) {
      auto t = with_uniform_halves(raw);
      CHECK(brute_force_solve(t, p) == oracle_first_labeling(t, p));
    }
  }
  auto p = fixture("mis").node_edge;
  auto t = with_uniform_halves(path_tree(40));
  CHECK_THROWS_AS(brute_force_solve(t, p, 10), PreconditionError);
}

TEST_CASE("solve_diameter agrees with brute force on solvability") {
  std::vector<NodeEdgeLFL> problems;
  for (const char* name : {"mis", "2col", "mis-paper", "empty-edges"}) problems.push_back(fixture(name).node_edge);
  problems.push_back(node_edge_of(fixture("3col")));
  for (const auto& p : problems)
    for (const auto& raw : nonisomorphic_trees_up_to(7)) {
      auto t = with_uniform_halves(raw);
      auto got = solve_diameter(t, p);
      auto ref = brute_force_solve(t, p);
      REQUIRE(got.has_value() == ref.has_value());
      if (got) CHECK(verify_node_edge(t, *got, p).valid);
    }
}

TEST_CASE("layered solving follows the assigner") {
  auto p = fixture("mis").node_edge;
  auto c = classify_problem(p);
  REQUIRE(c.kind == VerdictKind::Logarithmic);
  auto trees = sample_trees(30, 10, 300, 5);
  trees.push_back(with_uniform_halves(path_tree(500)));
  for (auto& t : trees) t = with_uniform_halves(t);
  for (const auto& t : trees) {
    auto lg = solve_options_for(c);
    auto r = solve_instance(t, p, lg);
    CHECK_MESSAGE(r.valid, r.error);
    auto po = lg;
    po.mode = SolveMode::Poly;
    po.k = 3;
    auto rp = solve_instance(t, p, po);
    CHECK_MESSAGE(rp.valid, rp.error);
    CHECK(rp.layers <= 3);
  }
  // 2-coloring needs a single rake layer.
  auto two = fixture("2col").node_edge;
  auto c2 = classify_problem(two);
  REQUIRE(c2.kind == VerdictKind::PolyTheta);
  auto o2 = solve_options_for(c2);
  CHECK(o2.k == 1);
  for (const auto& t : trees) {
    auto r = solve_instance(t, two, o2);
    CHECK_MESSAGE(r.valid, r.error);
    CHECK(r.layers == 1);
  }
}

TEST_CASE("layered solving reports assigner gaps") {
  auto p = fixture("mis").node_edge;
  auto t = with_uniform_halves(path_tree(60));
  SolveOptions o;
  o.mode = SolveMode::Log;
  o.ell = 3;
  Assigner none;
  o.assigner = &none;
  auto r = solve_instance(t, p, o);
  CHECK_FALSE(r.valid);
  CHECK(r.error.find("assigner undefined") != std::string::npos);
}

TEST_CASE("batch solving is the same serial and parallel") {
  auto p = fixture("mis").node_edge;
  auto c = classify_problem(p);
  auto trees = sample_trees(24, 20, 200, 9);
  for (auto& t : trees) t = with_uniform_halves(t);
  auto o = solve_options_for(c);
  auto a = solve_batch(trees, p, o, true);
  auto b = solve_batch(trees, p, o, false);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].labeling == b[i].labeling);
    CHECK(a[i].rounds == b[i].rounds);
    CHECK(a[i].valid);
  }
}

TEST_CASE("partition enumeration") {
  auto four = partitions_of(4);
  std::vector<std::vector<int>> want{{4}, {3, 1}, {2, 2}, {2, 1, 1}, {1, 1, 1, 1}};
  CHECK(four == want);
  CHECK(partition_count(4) == 5);
  CHECK(partition_count(10) == 42);
  CHECK(partition_count(100) == 190569292ULL);
  for (int g = 1; g <= 20; ++g) {
    auto all = partitions_of(g);
    REQUIRE(all.size() == partition_count(g));
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(partition_unrank(g, i + 1) == all[i]);
      CHECK(partition_rank(all[i]) == i + 1);
    }
  }
}

TEST_CASE("gadget thresholds and sizes") {
  CHECK_FALSE(gadget_g_valid(0.5, 3));
  CHECK(gadget_g_valid(0.5, 4));
  CHECK_THROWS_AS(generate_gadget_instance(0.5, 3, 2), PreconditionError);
  CHECK(build_gadget_path(3, 2, 0).tree.n() == 8);
  auto inst = generate_gadget_instance(0.5, 10, 4, 5);
  CHECK(inst.tree.n() == 4 + 40 + 5);
  CHECK(inst.unpadded_nodes() == 44);
  CHECK_THROWS_AS(generate_gadget_instance(0.5, 10, 6), PreconditionError);
  CHECK_THROWS_AS(build_gadget_path(10, 3, 2), PreconditionError);
}

TEST_CASE("gadget labelings are checked locally") {
  for (auto [g, L] : {std::pair{8, 4}, {10, 5}, {64, 16}}) {
    auto inst = generate_gadget_instance(0.5, g, L, 7);
    CHECK(check_gadget_labeling(inst, inst.required).valid);
    for (int v = 0; v < inst.tree.n(); v += 3) {
      auto flipped = inst.required;
      flipped[v] ^= 1;
      CHECK_FALSE(check_gadget_labeling(inst, flipped).valid);
    }
    auto zeros = std::vector<int>(inst.tree.n(), 0);
    CHECK_FALSE(check_gadget_labeling(inst, zeros).valid);
  }
  // Without v_1 no node may output 1.
  auto tail = build_gadget_path(10, 4, 3, 2);
  CHECK(check_gadget_labeling(tail, tail.required).valid);
  for (int v : tail.path) CHECK(tail.required[v] == 0);
}

TEST_CASE("the far end cannot tell whether v_1 exists") {
  auto pr = indistinguishability_pair(4096, 0.5);
  CHECK(pr.g1.g == 64);
  CHECK(pr.g1.length == 16);
  CHECK(pr.g1.tree.n() == 4096);
  CHECK(pr.g2.tree.n() == 4096);
  CHECK(pr.radius == 14);
  CHECK(pr.views_equal);
  CHECK(pr.next_views_differ);
  CHECK(pr.g1.required[pr.v1] == 1);
  CHECK(pr.g2.required[pr.v2] == 0);
  CHECK(check_gadget_labeling(pr.g1, pr.g1.required).valid);
  CHECK(check_gadget_labeling(pr.g2, pr.g2.required).valid);
  auto a = pr.g1.required;
  a[pr.v1] = 0;
  CHECK_FALSE(check_gadget_labeling(pr.g1, a).valid);
  auto b = pr.g2.required;
  b[pr.v2] = 1;
  CHECK_FALSE(check_gadget_labeling(pr.g2, b).valid);
}
