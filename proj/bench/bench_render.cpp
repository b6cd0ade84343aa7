// Fast renderer vs the serial reference, plus one objective evaluation.
//   bench_render --benchmark_filter=Slant

#include <benchmark/benchmark.h>
#include <omp.h>

#include <vector>

#include "psfcal/dataset.hpp"
#include "psfcal/estimator.hpp"
#include "psfcal/renderer.hpp"

using namespace psfcal;

namespace {

const CameraParams kParams{800.0, 23.6, 50.0};

// Slant from 1000 mm (in focus) to 1220 mm: mean r is about 4 px.
Scene slant_scene(int side) {
  return {synth_mask(MaskSpec{side, side, 4, default_mask_colors(), 5}), synth_depth(SlantDepth{1000.0, 1220.0}, side, side)};
}

Scene steps_scene(int side) {
  const int mid = side / 2;
  StepsDepth steps{{DepthStep{0, mid - 1, 1000.0}, DepthStep{mid, side - 1, 1400.0}}};
  return {synth_mask(MaskSpec{side, side, 8, default_mask_colors(), 5}), synth_depth(steps, side, side)};
}

void BM_SlantFast(benchmark::State& state) {
  const Scene scene = slant_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(render_focused(scene, kParams, 1000.0));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_SlantReference(benchmark::State& state) {
  const Scene scene = slant_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(render_focused_reference(scene, kParams, 1000.0));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_StepsFast(benchmark::State& state) {
  const Scene scene = steps_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(render_focused(scene, kParams, 1200.0));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_StepsReference(benchmark::State& state) {
  const Scene scene = steps_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(render_focused_reference(scene, kParams, 1200.0));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

// Fast path with the thread count pinned; results are identical for any count.
void BM_SlantFastThreads(benchmark::State& state) {
  const Scene scene = slant_scene(512);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(render_focused(scene, kParams, 1000.0));
  omp_set_num_threads(saved);
}

void BM_Objective(benchmark::State& state) {
  const Scene scene = steps_scene(128);
  std::vector<double> d;
  for (double df : {900.0, 1100.0, 1300.0, 1500.0}) d.push_back(image_distance(df, 50.0) - 23.6);
  const FocalStack stack = render_stack(scene, kParams, d);
  const StackObjective objective(stack);
  for (auto _ : state) benchmark::DoNotOptimize(objective(820.0, 23.4));
}

}  // namespace

BENCHMARK(BM_SlantFast)->Arg(64)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SlantReference)->Arg(64)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StepsFast)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StepsReference)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SlantFastThreads)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Objective)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
