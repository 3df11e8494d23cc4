// Serial against parallel for the three OpenMP kernels. Argument 0 runs serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "lfl/classify.hpp"
#include "lfl/io.hpp"
#include "lfl/reduce.hpp"
#include "lfl/sim.hpp"
#include "lfl/trees.hpp"
#include "lfl/types.hpp"

namespace {

lfl::NodeEdgeLFL load(const std::string& name) {
  auto p = lfl::load_problem(std::string(LFL_FIXTURE_DIR) + "/" + name + ".json");
  if (p.formalism == lfl::Formalism::NodeEdge) return p.node_edge;
  return lfl::run_pipeline(p.radius).node_edge.problem;
}

void BM_ComputeTypes(benchmark::State& state) {
  static const auto p = load("dist2-mark");
  lfl::ComputeTypesOptions opts;
  opts.parallel = state.range(0) != 0;
  for (auto _ : state) {
    auto r = lfl::compute_types(p, {}, opts);
    benchmark::DoNotOptimize(r.states);
  }
}

void BM_AssignerSearch(benchmark::State& state) {
  static const auto p = load("2col");
  lfl::SearchOptions opts;
  opts.parallel = state.range(0) != 0;
  for (auto _ : state) {
    auto c = lfl::classify_problem(p, opts);
    benchmark::DoNotOptimize(c.exponent);
  }
}

void BM_SolveBatch(benchmark::State& state) {
  static const auto p = load("mis");
  static const auto c = lfl::classify_problem(p);
  static const auto trees = [] {
    lfl::Rng rng(5);
    std::vector<lfl::TreeInstance> out;
    for (int i = 0; i < 64; ++i) {
      auto t = lfl::random_tree(2000, rng);
      lfl::set_uniform_inputs(t, 0);
      out.push_back(std::move(t));
    }
    return out;
  }();
  const auto opts = lfl::solve_options_for(c);
  for (auto _ : state) {
    auto r = lfl::solve_batch(trees, p, opts, state.range(0) != 0);
    benchmark::DoNotOptimize(r.data());
  }
}

}  // namespace

BENCHMARK(BM_ComputeTypes)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssignerSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
