#include <benchmark/benchmark.h>

#include <vector>

#include "rewrite_arena/benchmarks.hpp"
#include "rewrite_arena/eqsat.hpp"
#include "rewrite_arena/rule.hpp"
#include "rewrite_arena/sexpr.hpp"
#include "rewrite_arena/stochastic.hpp"

namespace ra = rewrite_arena;

static void BM_CollectCandidatesTrig(benchmark::State& state) {
  auto rules = ra::builtin_ruleset("trig");
  ra::Term t = ra::parse_sexpr("(+ (- (pow (sin x) 4) (pow (cos x) 4)) (* (tan x) (cos (* 2 x))))");
  ra::CandidateSet cs;
  for (auto _ : state) {
    cs.collect(t, *rules);
    benchmark::DoNotOptimize(cs.size());
  }
}
BENCHMARK(BM_CollectCandidatesTrig);

static void BM_CollectCandidatesMatmul(benchmark::State& state) {
  ra::Rng rng(1);
  ra::BenchmarkCase c = ra::gen_matmul_chain(static_cast<std::size_t>(state.range(0)), 1, 20, rng);
  ra::CandidateSet cs;
  for (auto _ : state) {
    cs.collect(c.input, *c.rules);
    benchmark::DoNotOptimize(cs.size());
  }
}
BENCHMARK(BM_CollectCandidatesMatmul)->Arg(10)->Arg(100);

static void BM_ChainSteps(benchmark::State& state) {
  ra::Rng gen(2);
  ra::BenchmarkCase c = ra::gen_matmul_chain(50, 1, 20, gen);
  ra::RunConfig cfg;
  cfg.max_steps = 1000;
  cfg.time_limit = 0;
  for (auto _ : state) {
    ra::Rng rng(3);
    ra::RunResult r = ra::run_chain(c.input, *c.rules, *c.stochastic_cost, cfg, {}, rng);
    benchmark::DoNotOptimize(r.best_cost);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ChainSteps);

static void BM_SaturateChain(benchmark::State& state) {
  ra::Rng rng(4);
  ra::BenchmarkCase c = ra::gen_matmul_chain(static_cast<std::size_t>(state.range(0)), 1, 20, rng);
  ra::SaturationOptions o;
  o.dims = c.dims;
  for (auto _ : state) {
    ra::SaturationResult r = ra::saturate(c.input, *c.rules, *c.eqsat_cost, o);
    benchmark::DoNotOptimize(r.cost);
  }
}
BENCHMARK(BM_SaturateChain)->Arg(8)->Arg(16);

static void BM_DynamicProgram(benchmark::State& state) {
  std::vector<std::int64_t> dims(static_cast<std::size_t>(state.range(0)) + 1);
  for (std::size_t i = 0; i < dims.size(); ++i) dims[i] = static_cast<std::int64_t>(1 + (i * 7) % 19);
  for (auto _ : state) benchmark::DoNotOptimize(ra::dp_optimal_cost(dims));
}
BENCHMARK(BM_DynamicProgram)->Arg(50)->Arg(200);

BENCHMARK_MAIN();
