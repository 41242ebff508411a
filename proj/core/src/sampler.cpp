// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "illumdiff/error.hpp"
#include "illumdiff/rng.hpp"

namespace illumdiff {

ImageTensor guidance_gradient(const ImageTensor& x, double t, const ImageTensor& score_at_x,
                              const VpSchedule& schedule, const GuidanceConfig& guidance,
                              EnergyBreakdown* record, bool* clipped) {
  if (clipped) *clipped = false;
  ImageTensor grad;
  if (guidance.eval_point == EvalPoint::on_denoised) {
    const double m = schedule.mean_coeff(t);
    const double v = schedule.variance(t);
    ImageTensor denoised = x;
    for (std::size_t i = 0; i < x.size(); ++i) denoised[i] = (x[i] + v * score_at_x[i]) / m;
    grad = grad_energy(denoised, guidance);
    // d x0_hat / d x ~ I / m(t) with the score Jacobian dropped.
    grad *= 1.0 / m;
    if (record) *record = eval_energy(denoised, guidance);
  } else {
    grad = grad_energy(x, guidance);
    if (record) *record = eval_energy(x, guidance);
  }

  if (guidance.clip_factor > 0.0) {
    const double cap = guidance.clip_factor * std::sqrt(static_cast<double>(grad.size()));
    const double norm = std::sqrt(squared_norm(grad));
    if (norm > cap) {
      grad *= cap / norm;
      if (clipped) *clipped = true;
    }
  }
  return grad;
}

SamplerRun reverse_sample_guided(const ScoreProvider& score, const GuidanceConfig* guidance,
                                 const VpSchedule& schedule, std::uint64_t seed, std::uint64_t chain) {
  if (schedule.steps() < 1) throw ParameterError("SDE sampling needs at least one step");
  if (score.schedule().beta_min() != schedule.beta_min() || score.schedule().beta_max() != schedule.beta_max()) {
    throw ParameterError("sampling schedule betas differ from the score model's");
  }
  const Shape shape = score.shape();
  if (guidance) guidance->validate(shape);
  const bool guided = guidance && guidance->active();

  SamplerRun run;
  run.seed = seed;
  run.chain = chain;

  CounterRng rng(seed, chain);
  ImageTensor x = rng.normal_image(shape);
  const int steps = schedule.steps();
  const double h = 1.0 / steps;
  const double sqrt_h = std::sqrt(h);

  for (int k = 0; k < steps; ++k) {
    const double s = 1.0 - k * h;
    const double beta = schedule.beta(s);
    ImageTensor drift_score = score.score(x, s);

    if (guided) {
      StepRecord rec{k, s, {}};
      bool clipped = false;
      drift_score -= guidance_gradient(x, s, drift_score, schedule, *guidance, &rec.energy, &clipped);
      run.clipped_steps += clipped ? 1 : 0;
      run.energy_trace.push_back(rec);
    }

    // x - [-1/2 beta x - beta (score - grad E)] h
    const bool last = k == steps - 1;
    const double noise_scale = last ? 0.0 : std::sqrt(beta) * sqrt_h;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double drift = -0.5 * beta * x[i] - beta * drift_score[i];
      x[i] = x[i] - drift * h;
    }
    if (!last) {
      for (double& v : x.data()) v += noise_scale * rng.normal();
    }
    if (!x.all_finite()) throw NumericError("sampler state became non-finite", static_cast<std::size_t>(k));
  }
  run.final = std::move(x);
  return run;
}

std::vector<SamplerRun> sample_chains(const ScoreProvider& score, const GuidanceConfig* guidance,
                                      const VpSchedule& schedule, std::uint64_t seed, int count,
                                      int threads) {
  if (count < 1) throw ParameterError("chain count must be at least 1");
  std::vector<SamplerRun> runs(count);
  const int workers = std::clamp(threads, 1, count);
  if (workers == 1) {
    for (int c = 0; c < count; ++c) runs[c] = reverse_sample_guided(score, guidance, schedule, seed, c);
    return runs;
  }

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int c = next++; c < count; c = next++) {
        try {
          runs[c] = reverse_sample_guided(score, guidance, schedule, seed, c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return runs;
}

}  // namespace illumdiff
