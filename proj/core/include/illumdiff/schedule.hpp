// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "illumdiff/image.hpp"

namespace illumdiff {

class CounterRng;

/// Variance-preserving SDE dx = -1/2 beta(t) x dt + sqrt(beta(t)) dw with linear
/// beta(t) = beta_min + t (beta_max - beta_min) on t in [0, 1].
///
/// The perturbation kernel is N(m(t) x0, v(t) I) with
/// m(t) = exp(-1/4 t^2 (beta_max - beta_min) - 1/2 t beta_min) and v(t) = 1 - m(t)^2.
class VpSchedule {
 public:
  VpSchedule() = default;
  /// `steps` may be zero, which gives an empty DDIM trajectory; the SDE sampler needs >= 1.
  VpSchedule(double beta_min, double beta_max, int steps);

  double beta_min() const noexcept { return beta_min_; }
  double beta_max() const noexcept { return beta_max_; }
  int steps() const noexcept { return steps_; }

  double beta(double t) const noexcept { return beta_min_ + t * (beta_max_ - beta_min_); }
  double mean_coeff(double t) const noexcept;
  double variance(double t) const noexcept;
  double diffusion_sq(double t) const noexcept { return beta(t); }

  /// Uniform step grid time k / steps.
  double time_at(int k) const noexcept { return static_cast<double>(k) / steps_; }

  VpSchedule with_steps(int steps) const { return VpSchedule(beta_min_, beta_max_, steps); }

 private:
  double beta_min_ = 0.1;
  double beta_max_ = 20.0;
  int steps_ = 200;
};

/// Draws m(t) x0 + sqrt(v(t)) z. Throws ParameterError for t outside [0, 1].
ImageTensor perturb(const ImageTensor& x0, double t, const VpSchedule& schedule, CounterRng& rng);

}  // namespace illumdiff
