// Microbenchmarks for the per-iteration hot paths: bonus evaluation (pure
// forward passes), network forward/backward, curvature products and the
// dynamics model update.

#include <benchmark/benchmark.h>

#include <vector>

#include "surprise/bonus.hpp"
#include "surprise/dynamics.hpp"
#include "surprise/mlp.hpp"
#include "surprise/rng.hpp"

using namespace surprise;

namespace {

std::vector<TransitionTuple> random_transitions(std::size_t n,
                                                std::size_t state_dim,
                                                std::size_t action_dim,
                                                std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TransitionTuple> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    TransitionTuple t;
    for (std::size_t d = 0; d < state_dim; ++d) t.s.push_back(rng.normal());
    for (std::size_t d = 0; d < action_dim; ++d) t.a.push_back(rng.normal());
    for (std::size_t d = 0; d < state_dim; ++d) {
      t.s_next.push_back(rng.normal());
    }
    out.push_back(std::move(t));
  }
  return out;
}

DynamicsModel bench_model(std::size_t state_dim, std::size_t action_dim) {
  DynamicsModelConfig cfg;
  cfg.state_dim = state_dim;
  cfg.action_dim = action_dim;
  cfg.hidden = {32};
  cfg.seed = 7;
  return DynamicsModel(cfg);
}

void BM_SurprisalBonus(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  DynamicsModel model = bench_model(4, 1);
  const auto data = random_transitions(n, 4, 1, 1);
  const auto batch = model.prepare(data);
  for (auto _ : state) {
    auto raw = surprisal_bonus(model, batch);
    benchmark::DoNotOptimize(raw);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(n));
}
BENCHMARK(BM_SurprisalBonus)->RangeMultiplier(2)->Range(1000, 8000);

void BM_MlpForward(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  MlpSpec spec{5, {32}, 8, 3};
  const ParamVector params = mlp_init(spec);
  Rng rng(2);
  Tensor x = Tensor::zeros({n, 5});
  for (double& v : x.data) v = rng.normal();
  for (auto _ : state) {
    Tensor y = mlp_forward(params, spec, x);
    benchmark::DoNotOptimize(y);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(n));
}
BENCHMARK(BM_MlpForward)->RangeMultiplier(2)->Range(1000, 8000);

void BM_GaussNewtonVp(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  MlpSpec spec{5, {32}, 8, 3};
  const ParamVector params = mlp_init(spec);
  Rng rng(2);
  Tensor x = Tensor::zeros({n, 5});
  for (double& v : x.data) v = rng.normal();
  const Metric metric = Metric::identity(n, 8);
  ParamVector v = ParamVector::zeros_like(params);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = rng.normal();
  for (auto _ : state) {
    ParamVector av = gauss_newton_vector_product(params, spec, x, metric, v);
    benchmark::DoNotOptimize(av);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(n));
}
BENCHMARK(BM_GaussNewtonVp)->RangeMultiplier(2)->Range(1000, 4000);

void BM_ModelUpdate(benchmark::State& state) {
  DynamicsModel model = bench_model(4, 1);
  ReplayMemory mem(100000);
  const auto data = random_transitions(20000, 4, 1, 5);
  mem.insert(std::span<const TransitionTuple>(data));
  model.observe(data);
  SnapshotRing ring(2);
  ModelUpdateConfig cfg;
  cfg.batch_size = 5000;
  cfg.kappa = 0.001;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = seed++;
    StepReport rep = model_update(model, mem, ring, cfg);
    benchmark::DoNotOptimize(rep);
  }
}
BENCHMARK(BM_ModelUpdate);

}  // namespace

BENCHMARK_MAIN();
