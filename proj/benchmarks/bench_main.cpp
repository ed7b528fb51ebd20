#include <benchmark/benchmark.h>

#include <random>

#include "anodec/eval/suite.hpp"
#include "anodec/learn/train.hpp"

namespace {

using namespace anodec;

template <class Params>
Params random_params(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Params p;
  for (auto& v : p.flat()) v = u(rng);
  return p;
}

std::vector<learn::Trial> random_trials(double duration, int count) {
  const Grid grid(duration);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<learn::Trial> trials;
  for (int k = 0; k < count; ++k) {
    std::vector<double> in(grid.samples()), out(grid.samples());
    for (auto& v : in) v = 6.0 * u(rng);
    for (auto& v : out) v = u(rng);
    trials.push_back({siggen::SampledSignal(grid, in), siggen::SampledSignal(grid, out)});
  }
  return trials;
}

void BM_ModelPredict(benchmark::State& state) {
  const auto params = random_params<nets::ModelParams>(2);
  const auto trials = random_trials(static_cast<double>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(learn::predict_output(params, trials.front().input));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trials.front().input.values.size()));
}
BENCHMARK(BM_ModelPredict)->Arg(5)->Arg(8);

void BM_ModelLossAndGrad(benchmark::State& state) {
  const auto params = random_params<nets::ModelParams>(3);
  const auto trials = random_trials(5.0, 5);
  for (auto _ : state) benchmark::DoNotOptimize(learn::model_loss_and_grad(params, trials, 1));
}
BENCHMARK(BM_ModelLossAndGrad)->Unit(benchmark::kMillisecond);

void BM_ControllerObjective(benchmark::State& state) {
  const auto model = random_params<nets::ModelParams>(4);
  const auto controller = random_params<nets::ControllerParams>(5);
  const std::vector<double> refs(static_cast<std::size_t>(state.range(0)), 0.3);
  const Grid grid(5.0);
  for (auto _ : state) benchmark::DoNotOptimize(learn::controller_objective(model, controller, refs, grid, 4e-4, 1));
}
BENCHMARK(BM_ControllerObjective)->Arg(1)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_PlantTrial(benchmark::State& state) {
  plant::Plant plant(plant::PlantConfig::setup(1), 6);
  eval::PidController pid;
  const auto ref = siggen::draw_cubic_spline_reference(Grid(5.0), {}, 7);
  for (auto _ : state) benchmark::DoNotOptimize(eval::run_trial(plant, pid, ref));
}
BENCHMARK(BM_PlantTrial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
