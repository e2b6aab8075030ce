#include <map>

#include <benchmark/benchmark.h>

#include "dyncomm/community_mapper.hpp"
#include "dyncomm/modularity.hpp"
#include "dyncomm/rescal.hpp"
#include "dyncomm/synth.hpp"

namespace {

using namespace dyncomm;

const DsbmInstance& instance(std::size_t n) {
  static std::map<std::size_t, DsbmInstance> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    DsbmConfig d;
    d.num_nodes = n;
    d.num_communities = 8;
    d.num_slices = 4;
    d.p_in = 20.0 / (static_cast<double>(n) / 8.0);
    d.p_out = 2.0 / static_cast<double>(n);
    d.seed = 1;
    it = cache.emplace(n, generate_dsbm(d)).first;
  }
  return it->second;
}

void BM_SliceMatmul(benchmark::State& state) {
  const TemporalGraph& g = instance(static_cast<std::size_t>(state.range(0))).graph;
  const Matrix m = Matrix::Random(static_cast<Eigen::Index>(g.num_nodes()), 16);
  for (auto _ : state) benchmark::DoNotOptimize(slice_matmul(g, 0, m));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.slice(0).edges().size()));
}
BENCHMARK(BM_SliceMatmul)->Arg(500)->Arg(2000)->Arg(8000);

void BM_RescalSweep(benchmark::State& state) {
  const TemporalGraph& g = instance(static_cast<std::size_t>(state.range(0))).graph;
  RescalConfig cfg;
  cfg.rank = 16;
  cfg.max_iters = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fit_rescal(g, cfg));
}
BENCHMARK(BM_RescalSweep)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_MapperGradients(benchmark::State& state) {
  const TemporalGraph& g = instance(static_cast<std::size_t>(state.range(0))).graph;
  RescalConfig rc;
  rc.rank = 16;
  rc.max_iters = 5;
  const FactorModel f = fit_rescal(g, rc).model;
  const MlpParams p = init_mlp(16, 32, 8, 0);
  for (auto _ : state) benchmark::DoNotOptimize(mapper_gradients(g, f, p, 0.1));
}
BENCHMARK(BM_MapperGradients)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_LouvainFromSingletons(benchmark::State& state) {
  const TemporalGraph& g = instance(static_cast<std::size_t>(state.range(0))).graph;
  Labels seed(g.num_nodes());
  for (std::size_t v = 0; v < seed.size(); ++v) seed[v] = static_cast<Label>(v);
  for (auto _ : state) benchmark::DoNotOptimize(louvain_refine(g, 0, seed));
}
BENCHMARK(BM_LouvainFromSingletons)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
