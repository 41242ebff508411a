// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "illumdiff/ddim.hpp"
#include "illumdiff/illumination.hpp"

namespace illumdiff {

struct RelightResult {
  ImageTensor latent;
  SamplerRun run;
};

/// Geometry-preserving relighting: inverts `x0` to its DDIM latent, then denoises the latent
/// with illumination guidance toward `target_illum` and geometry guidance toward
/// extract_ccr(x0). `guidance` supplies the weights and extraction settings; its targets are
/// overwritten.
RelightResult relight(const ImageTensor& x0, const IlluminationMap& target_illum, const ScoreProvider& score,
                      const VpSchedule& schedule, GuidanceConfig guidance, int refine_iterations = 4);

/// Same, with the target composed from a light prompt at the image's resolution.
RelightResult relight(const ImageTensor& x0, const LightPrompt& prompt, const ScoreProvider& score,
                      const VpSchedule& schedule, GuidanceConfig guidance, int refine_iterations = 4);

/// Guidance for generation toward a light prompt, illumination term only.
GuidanceConfig illumination_guidance(const LightPrompt& prompt, const Shape& shape, double lambda_i,
                                     const RetinexConfig& retinex = {});

}  // namespace illumdiff
