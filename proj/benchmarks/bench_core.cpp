// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <numbers>

#include "illumdiff/convolve.hpp"
#include "illumdiff/ddim.hpp"
#include "illumdiff/energy.hpp"
#include "illumdiff/pipeline.hpp"
#include "illumdiff/presets.hpp"
#include "illumdiff/rng.hpp"
#include "illumdiff/sampler.hpp"
#include "illumdiff/score.hpp"

namespace {

using namespace illumdiff;

ImageTensor random_image(int size) {
  CounterRng rng(1, 0);
  return rng.uniform_image({size, size, 3}, 0.1, 0.9);
}

void BM_Convolve(benchmark::State& state) {
  const ImageTensor img = random_image(static_cast<int>(state.range(0)));
  const Kernel2D k = gaussian_kernel(static_cast<double>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(convolve2d(img, k));
}
BENCHMARK(BM_Convolve)->Args({32, 1})->Args({32, 16})->Args({128, 4});

void BM_ExtractIllumination(benchmark::State& state) {
  const ImageTensor img = random_image(static_cast<int>(state.range(0)));
  const RetinexConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(extract_illumination(img, cfg));
}
BENCHMARK(BM_ExtractIllumination)->Arg(32)->Arg(64);

void BM_GradEnergy(benchmark::State& state) {
  const ImageTensor x = random_image(32);
  GuidanceConfig g;
  g.target_illum = compose_prompt(side_prompt(std::numbers::pi, 32, 32), 32, 32);
  g.target_ccr = extract_ccr(random_image(32), g.ccr);
  for (auto _ : state) benchmark::DoNotOptimize(grad_energy(x, g));
}
BENCHMARK(BM_GradEnergy);

void BM_EmpiricalScore(benchmark::State& state) {
  const VpSchedule sched(0.1, 20.0, 200);
  const EmpiricalScore score(dataset_images(make_dataset(1, static_cast<std::size_t>(state.range(0)), desk_recipe())),
                             sched);
  const ImageTensor x = random_image(32);
  for (auto _ : state) benchmark::DoNotOptimize(score.score(x, 0.5));
}
BENCHMARK(BM_EmpiricalScore)->Arg(64)->Arg(256);

void BM_GuidedSample(benchmark::State& state) {
  const VpSchedule sched(0.1, 20.0, static_cast<int>(state.range(0)));
  const EmpiricalScore score(dataset_images(make_dataset(1, 64, desk_recipe())), sched);
  const GuidanceConfig g = illumination_guidance(side_prompt(std::numbers::pi, 32, 32), {32, 32, 3}, 100.0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(reverse_sample_guided(score, &g, sched, seed++));
}
BENCHMARK(BM_GuidedSample)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_DdimRoundTrip(benchmark::State& state) {
  const VpSchedule sched(0.1, 20.0, 100);
  const auto data = dataset_images(make_dataset(1, 64, desk_recipe()));
  const EmpiricalScore score(data, sched);
  for (auto _ : state) benchmark::DoNotOptimize(ddim_sample(score, sched, ddim_invert(data[3], score, sched)));
}
BENCHMARK(BM_DdimRoundTrip)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
