// Serial reference vs OpenMP kernels on synthetic data.

#include <benchmark/benchmark.h>

#include "cascadefuse/dataset.hpp"
#include "cascadefuse/log.hpp"
#include "cascadefuse/parallel.hpp"

using namespace cascadefuse;

namespace {

const DatasetManifest& corpus() {
  static const DatasetManifest data = [] {
    set_warnings_enabled(false);
    return generate_synthetic(16, 42);
  }();
  return data;
}

const Featurizer& featurizer() {
  static const Featurizer f = Featurizer::fit(corpus().stories, FeatureConfig{});
  return f;
}

template <auto Fn>
void infectiousness(benchmark::State& state) {
  const auto grid = hourly_grid(47);
  const auto& stories = corpus().stories;
  for (auto _ : state) benchmark::DoNotOptimize(Fn(stories, grid, KernelParams{}));
}

template <auto Fn>
void featurize(benchmark::State& state) {
  const auto& f = featurizer();
  const auto& stories = corpus().stories;
  for (auto _ : state) benchmark::DoNotOptimize(Fn(f, stories));
}

template <auto Fn>
void predict(benchmark::State& state) {
  static const auto bundles = parallel::featurize_omp(featurizer(), corpus().stories);
  ModelConfig cfg;
  cfg.vocab_size = featurizer().vocab.size();
  const FusionModel model(cfg);
  const auto params = model.init_parameters(1);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(model, params, bundles));
}

template <auto Fn>
void simulate(benchmark::State& state) {
  const auto profile = InfectiousnessProfile::constant(4e-3);
  const auto followers = FollowerSampler::lognormal(30, 1);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(profile, followers, 24 * 3600.0, 7, 32, SimulationOptions{}));
}

}  // namespace

BENCHMARK(infectiousness<parallel::infectiousness_serial>)->Name("infectiousness/serial")->UseRealTime();
BENCHMARK(infectiousness<parallel::infectiousness_omp>)->Name("infectiousness/omp")->UseRealTime();
BENCHMARK(featurize<parallel::featurize_serial>)->Name("featurize/serial")->UseRealTime();
BENCHMARK(featurize<parallel::featurize_omp>)->Name("featurize/omp")->UseRealTime();
BENCHMARK(predict<parallel::predict_serial>)->Name("predict/serial")->UseRealTime();
BENCHMARK(predict<parallel::predict_omp>)->Name("predict/omp")->UseRealTime();
BENCHMARK(simulate<parallel::simulate_serial>)->Name("simulate/serial")->UseRealTime();
BENCHMARK(simulate<parallel::simulate_omp>)->Name("simulate/omp")->UseRealTime();

BENCHMARK_MAIN();
