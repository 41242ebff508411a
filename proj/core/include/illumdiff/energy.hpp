// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>

#include "illumdiff/ccr.hpp"
#include "illumdiff/illumination.hpp"

namespace illumdiff {

/// Where the guidance energy is evaluated during sampling: on the noisy sample itself, or on
/// its Tweedie-denoised estimate (gradient chained back with the affine factor 1/m(t)).
enum class EvalPoint { on_sample, on_denoised };

struct GuidanceConfig {
  double lambda_i = 100.0;
  double lambda_r = 50.0;
  IlluminationMap target_illum;
  std::optional<CcrMap> target_ccr;
  RetinexConfig retinex;
  CcrConfig ccr;
  EvalPoint eval_point = EvalPoint::on_denoised;
  /// Gradient L2 norm cap as a multiple of sqrt(D); zero disables clipping.
  double clip_factor = 10.0;

  /// True when at least one weight is non-zero.
  bool active() const noexcept { return lambda_i != 0.0 || lambda_r != 0.0; }
  /// Throws ParameterError / ShapeError when weights are negative, targets do not match
  /// `image_shape`, or the geometry target is missing while lambda_r > 0.
  void validate(const Shape& image_shape) const;
};

struct EnergyBreakdown {
  double total = 0.0;
  double illum_term = 0.0;  // mean squared illumination residual
  double geom_term = 0.0;   // mean squared log-CCR residual, 0 without a geometry target
};

EnergyBreakdown eval_energy(const ImageTensor& x, const GuidanceConfig& cfg);

/// Analytic gradient of `eval_energy(x, cfg).total` with respect to x.
ImageTensor grad_energy(const ImageTensor& x, const GuidanceConfig& cfg);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate.
ImageTensor fd_gradient(const std::function<double(const ImageTensor&)>& f, const ImageTensor& x, double h = 1e-3);
ImageTensor fd_gradient(const ImageTensor& x, const GuidanceConfig& cfg, double h = 1e-3);

/// ||a - b|| / max(||b||, tiny).
double relative_l2_error(const ImageTensor& a, const ImageTensor& b);

}  // namespace illumdiff
