// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "illumdiff/energy.hpp"
#include "illumdiff/score.hpp"

namespace illumdiff {

struct StepRecord {
  int step = 0;
  double t = 0.0;  // time at which the energy was evaluated
  EnergyBreakdown energy;
};

struct SamplerRun {
  std::uint64_t seed = 0;
  std::uint64_t chain = 0;
  ImageTensor final;
  std::vector<StepRecord> energy_trace;  // filled only while guidance is active
  int clipped_steps = 0;                 // steps whose guidance gradient hit the norm cap
};

/// Guidance gradient to inject at (x, t) given the model score there: evaluated on x or on its
/// denoised estimate (chained with 1/m(t)), then clipped to clip_factor * sqrt(D). `record`,
/// when non-null, receives the energy at the evaluation point; `clipped` is set when the cap
/// was applied.
ImageTensor guidance_gradient(const ImageTensor& x, double t, const ImageTensor& score_at_x,
                              const VpSchedule& schedule, const GuidanceConfig& guidance,
                              EnergyBreakdown* record, bool* clipped);

/// Euler-Maruyama integration of the guided reverse VP-SDE from t = 1 down to t = 0 with
/// h = 1 / steps:
///   x <- x - [f(x, s) - g(s)^2 (score(x, s) - grad E)] h + g(s) sqrt(h) z
/// starting from x ~ N(0, I); the last step adds no noise. `guidance` may be null.
/// The chain's noise comes from CounterRng(seed, chain).
/// Throws NumericError with the step index if the state becomes non-finite.
SamplerRun reverse_sample_guided(const ScoreProvider& score, const GuidanceConfig* guidance,
                                 const VpSchedule& schedule, std::uint64_t seed, std::uint64_t chain = 0);

/// Runs chains 0..count-1 of `seed`, on up to `threads` worker threads. Results are ordered
/// by chain and identical for any thread count.
std::vector<SamplerRun> sample_chains(const ScoreProvider& score, const GuidanceConfig* guidance,
                                      const VpSchedule& schedule, std::uint64_t seed, int count,
                                      int threads = 1);

}  // namespace illumdiff
