#include <benchmark/benchmark.h>

#include "optboost/dynamics.hpp"
#include "optboost/geometry.hpp"
#include "optboost/stumps.hpp"
#include "optboost/synth.hpp"

namespace {

using namespace optboost;

Dataset data_for(benchmark::State& state) {
  return make_two_gaussians(static_cast<std::size_t>(state.range(0)), 2.0, 1);
}

void BM_BuildMatrix(benchmark::State& state) {
  const auto ds = data_for(state);
  const auto stumps = enumerate_stumps(ds);
  for (auto _ : state) benchmark::DoNotOptimize(build_matrix(ds, stumps));
  state.counters["stumps"] = static_cast<double>(stumps.size());
}
BENCHMARK(BM_BuildMatrix)->Arg(100)->Arg(200)->Arg(400);

void BM_RowErrors(benchmark::State& state) {
  const auto ds = data_for(state);
  const auto m = build_matrix(ds, enumerate_stumps(ds));
  const auto w = init_weight(RandomSimplexInit{1}, ds.size());
  std::vector<double> errors(m.rows());
  for (auto _ : state) {
    m.errors(w.values(), errors);
    benchmark::DoNotOptimize(errors.data());
  }
  state.counters["rows"] = static_cast<double>(m.rows());
}
BENCHMARK(BM_RowErrors)->Arg(100)->Arg(200)->Arg(400);

void BM_AUpdate(benchmark::State& state) {
  const auto ds = data_for(state);
  const auto m = build_matrix(ds, enumerate_stumps(ds));
  WeightVector w = WeightVector::uniform(ds.size());
  for (int t = 0; t < 1000; ++t) w = a_update(m, w).next;
  for (auto _ : state) benchmark::DoNotOptimize(a_update(m, w));
}
BENCHMARK(BM_AUpdate)->Arg(100)->Arg(200)->Arg(400);

void BM_Run(benchmark::State& state) {
  const auto ds = make_two_gaussians(200, 2.0, 1);
  const auto m = build_matrix(ds, enumerate_stumps(ds));
  RunOptions opts;
  opts.rounds = static_cast<std::size_t>(state.range(0));
  opts.equivalence_eps = state.range(1) ? std::optional<double>(1e-15) : std::nullopt;
  for (auto _ : state) benchmark::DoNotOptimize(run(m, WeightVector::uniform(ds.size()), opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Run)->Args({1000, 0})->Args({1000, 1})->Unit(benchmark::kMillisecond);

void BM_AInverse(benchmark::State& state) {
  const auto ds = data_for(state);
  const auto m = build_matrix(ds, enumerate_stumps(ds));
  WeightVector w = WeightVector::uniform(ds.size());
  for (int t = 0; t < 1000; ++t) w = a_update(m, w).next;
  for (auto _ : state) benchmark::DoNotOptimize(a_inverse(m, w.values()));
}
BENCHMARK(BM_AInverse)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
