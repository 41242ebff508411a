// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/pipeline.hpp"

namespace illumdiff {

RelightResult relight(const ImageTensor& x0, const IlluminationMap& target_illum, const ScoreProvider& score,
                      const VpSchedule& schedule, GuidanceConfig guidance, int refine_iterations) {
  guidance.target_illum = target_illum;
  guidance.target_ccr = extract_ccr(x0, guidance.ccr);
  guidance.validate(x0.shape());

  RelightResult result;
  result.latent = ddim_invert(x0, score, schedule, refine_iterations);
  result.run = ddim_sample(score, schedule, result.latent, &guidance);
  return result;
}

RelightResult relight(const ImageTensor& x0, const LightPrompt& prompt, const ScoreProvider& score,
                      const VpSchedule& schedule, GuidanceConfig guidance, int refine_iterations) {
  return relight(x0, compose_prompt(prompt, x0.height(), x0.width()), score, schedule, std::move(guidance),
                 refine_iterations);
}

GuidanceConfig illumination_guidance(const LightPrompt& prompt, const Shape& shape, double lambda_i,
                                     const RetinexConfig& retinex) {
  GuidanceConfig cfg;
  cfg.lambda_i = lambda_i;
  cfg.lambda_r = 0.0;
  cfg.retinex = retinex;
  cfg.target_illum = compose_prompt(prompt, shape.height, shape.width);
  return cfg;
}

}  // namespace illumdiff
