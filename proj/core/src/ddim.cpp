// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/ddim.hpp"

#include <cmath>

#include "illumdiff/error.hpp"

namespace illumdiff {

namespace {

void check_schedules(const ScoreProvider& score, const VpSchedule& schedule) {
  if (score.schedule().beta_min() != schedule.beta_min() || score.schedule().beta_max() != schedule.beta_max()) {
    throw ParameterError("sampling schedule betas differ from the score model's");
  }
}

ImageTensor eps_from_score(const ImageTensor& score, double v) {
  ImageTensor eps = score;
  eps *= -std::sqrt(v);
  return eps;
}

}  // namespace

SamplerRun ddim_sample(const ScoreProvider& score, const VpSchedule& schedule, const ImageTensor& x_start,
                       const GuidanceConfig* guidance) {
  check_schedules(score, schedule);
  if (x_start.shape() != score.shape()) throw ShapeError("latent shape does not match the score model");
  if (guidance) guidance->validate(x_start.shape());
  const bool guided = guidance && guidance->active();

  SamplerRun run;
  ImageTensor x = x_start;
  const int steps = schedule.steps();
  for (int k = steps; k >= 1; --k) {
    const double t = schedule.time_at(k);
    const double t_prev = schedule.time_at(k - 1);
    const double m = schedule.mean_coeff(t);
    const double v = schedule.variance(t);
    ImageTensor sc = score.score(x, t);
    if (guided) {
      StepRecord rec{steps - k, t, {}};
      bool clipped = false;
      sc -= guidance_gradient(x, t, sc, schedule, *guidance, &rec.energy, &clipped);
      run.clipped_steps += clipped ? 1 : 0;
      run.energy_trace.push_back(rec);
    }
    const ImageTensor eps = eps_from_score(sc, v);
    const double m_prev = schedule.mean_coeff(t_prev);
    const double sd_prev = std::sqrt(schedule.variance(t_prev));
    const double sd = std::sqrt(v);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double x0_hat = (x[i] - sd * eps[i]) / m;
      x[i] = m_prev * x0_hat + sd_prev * eps[i];
    }
    if (!x.all_finite()) throw NumericError("DDIM state became non-finite", static_cast<std::size_t>(steps - k));
  }
  run.final = std::move(x);
  return run;
}

ImageTensor ddim_invert(const ImageTensor& x0, const ScoreProvider& score, const VpSchedule& schedule,
                        int refine_iterations) {
  check_schedules(score, schedule);
  if (x0.shape() != score.shape()) throw ShapeError("image shape does not match the score model");
  if (refine_iterations < 0) throw ParameterError("refine_iterations must be non-negative");

  ImageTensor x = x0;
  const int steps = schedule.steps();
  for (int k = 0; k < steps; ++k) {
    const double t = schedule.time_at(k);
    const double t_next = schedule.time_at(k + 1);
    const double m = schedule.mean_coeff(t);
    const double sd = std::sqrt(schedule.variance(t));
    const double m_next = schedule.mean_coeff(t_next);
    const double v_next = schedule.variance(t_next);
    const double sd_next = std::sqrt(v_next);

    // Inverse of the sampling step t_next -> t for a given eps:
    //   x_next = (m_next / m) (x - sd eps) + sd_next eps
    auto step_up = [&](const ImageTensor& eps) {
      ImageTensor out = x;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = (m_next / m) * (x[i] - sd * eps[i]) + sd_next * eps[i];
      return out;
    };

    ImageTensor next = step_up(eps_from_score(score.score(x, t_next), v_next));
    for (int it = 0; it < refine_iterations; ++it) next = step_up(eps_from_score(score.score(next, t_next), v_next));
    x = std::move(next);
    if (!x.all_finite()) throw NumericError("DDIM inversion became non-finite", static_cast<std::size_t>(k));
  }
  return x;
}

}  // namespace illumdiff
