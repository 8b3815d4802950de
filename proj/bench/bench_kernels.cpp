#include <memory>
#include <vector>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "dpd/simulation.hpp"
#include "dpd/testing.hpp"

namespace {

dpd::ChiSquareMixture mixture(std::int64_t draws) {
  dpd::ChiSquareMixture m;
  m.weights = (dpd::Vector(3) << 1.2, 0.6, 0.2).finished();
  m.mc_draws = draws;
  return m;
}

dpd::ExperimentPlan plan(int replications) {
  const auto normal = std::make_shared<dpd::NormalModel>();
  const dpd::Vector core = (dpd::Vector(2) << 0.0, 1.0).finished();
  const dpd::Vector outlier = (dpd::Vector(2) << -10.0, 1.0).finished();
  dpd::ExperimentPlan p(dpd::MixtureScenario::contaminated(normal, core, outlier, 0.1), normal,
                        dpd::normal_mean_constraint(0.0));
  p.betas = {0.0, 0.25};
  p.sample_sizes = {50};
  p.replications = replications;
  return p;
}

void BM_MixtureSerial(benchmark::State& state) {
  const auto m = mixture(state.range(0));
  std::vector<double> out(static_cast<std::size_t>(m.mc_draws));
  for (auto _ : state) {
    dpd::sample_mixture_serial(m, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MixtureParallel(benchmark::State& state) {
  const auto m = mixture(state.range(0));
  std::vector<double> out(static_cast<std::size_t>(m.mc_draws));
  for (auto _ : state) {
    dpd::sample_mixture(m, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

void BM_SimulationSerial(benchmark::State& state) {
  const auto p = plan(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dpd::run_experiment_serial(p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulationParallel(benchmark::State& state) {
  const auto p = plan(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dpd::run_experiment(p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_MixtureSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MixtureParallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulationSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulationParallel)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
