// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "illumdiff/sampler.hpp"

namespace illumdiff {

// Deterministic DDIM on the uniform grid tau_k = k / steps, k = 0..steps. With
// eps = -sqrt(v) score, one step from tau_k to tau_{k-1} is
//   x0_hat = (x - sqrt(v_k) eps) / m_k,   x <- m_{k-1} x0_hat + sqrt(v_{k-1}) eps
// so the final step (tau_0 = 0) returns the denoised estimate itself.

/// Denoises `x_start` (the latent at t = 1). With active guidance the score is replaced by
/// score - grad E and the energy at each evaluation point is traced. A zero-step schedule
/// returns the latent unchanged.
SamplerRun ddim_sample(const ScoreProvider& score, const VpSchedule& schedule, const ImageTensor& x_start,
                       const GuidanceConfig* guidance = nullptr);

/// Runs the DDIM update in ascending time from x0 to the latent at t = 1. Each step solves the
/// implicit inverse of the corresponding sampling step by fixed-point iteration on eps,
/// starting from eps(x_k, tau_{k+1}); `refine_iterations` = 0 gives the classic explicit
/// inversion.
ImageTensor ddim_invert(const ImageTensor& x0, const ScoreProvider& score, const VpSchedule& schedule,
                        int refine_iterations = 4);

}  // namespace illumdiff
