// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/schedule.hpp"

#include <cmath>

#include "illumdiff/error.hpp"
#include "illumdiff/rng.hpp"

namespace illumdiff {

VpSchedule::VpSchedule(double beta_min, double beta_max, int steps)
    : beta_min_(beta_min), beta_max_(beta_max), steps_(steps) {
  if (!(beta_min > 0.0) || !std::isfinite(beta_min)) throw ParameterError("beta_min must be positive");
  if (!(beta_max > 0.0) || !std::isfinite(beta_max)) throw ParameterError("beta_max must be positive");
  if (steps < 0) throw ParameterError("schedule steps must be non-negative");
}

double VpSchedule::mean_coeff(double t) const noexcept {
  return std::exp(-0.25 * t * t * (beta_max_ - beta_min_) - 0.5 * t * beta_min_);
}

double VpSchedule::variance(double t) const noexcept {
  // 1 - m^2 = -expm1(2 log m), accurate near t = 0.
  const double log_m = -0.25 * t * t * (beta_max_ - beta_min_) - 0.5 * t * beta_min_;
  return -std::expm1(2.0 * log_m);
}

ImageTensor perturb(const ImageTensor& x0, double t, const VpSchedule& schedule, CounterRng& rng) {
  if (!(t >= 0.0 && t <= 1.0)) throw ParameterError("perturb time must lie in [0, 1]");
  const double m = schedule.mean_coeff(t);
  const double sd = std::sqrt(schedule.variance(t));
  ImageTensor out = x0;
  for (double& v : out.data()) v = m * v + sd * rng.normal();
  return out;
}

}  // namespace illumdiff
