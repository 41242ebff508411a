// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "illumdiff/convolve.hpp"
#include "illumdiff/image.hpp"

namespace illumdiff {

/// Single-channel, non-negative illumination map: both the estimate extracted from an image
/// and the target built from a light prompt.
using IlluminationMap = ImageTensor;

/// Multi-scale blur weights and scales. Weights are normalized to sum to one on construction
/// and the Gaussian kernels (radius ceil(3 sigma)) are built once here.
class RetinexConfig {
 public:
  /// Scales {1, 4, 16} px with uniform weights, channel averaging on.
  RetinexConfig();
  /// Empty `weights` means uniform.
  RetinexConfig(std::vector<double> scales, std::vector<double> weights, bool channel_average = true);

  const std::vector<double>& scales() const noexcept { return scales_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  bool channel_average() const noexcept { return channel_average_; }
  const std::vector<Kernel2D>& kernels() const noexcept { return kernels_; }

 private:
  std::vector<double> scales_;
  std::vector<double> weights_;
  bool channel_average_ = true;
  std::vector<Kernel2D> kernels_;
};

/// Sum over r,g,b of the weighted multi-scale Gaussian blur, divided by 3 when channel
/// averaging is on (so a constant image c maps to c). Throws ShapeError unless `img` is 3-channel.
IlluminationMap extract_illumination(const ImageTensor& img, const RetinexConfig& cfg);

/// Transpose of `extract_illumination`: maps a 1-channel cotangent to a 3-channel one.
ImageTensor extract_illumination_adjoint(const IlluminationMap& cotangent, const RetinexConfig& cfg);

struct GaussianLight {
  double alpha = 1.0;
  std::array<double, 2> mu{0.0, 0.0};  // (row, col) in px
  std::array<std::array<double, 2>, 2> sigma{{{1.0, 0.0}, {0.0, 1.0}}};  // px^2, symmetric positive definite
};

/// Target lighting as a mixture of peak-normalized planar Gaussians over an ambient floor.
struct LightPrompt {
  std::vector<GaussianLight> components;
  double base = 0.1;

  /// Throws ParameterError unless alphas sum to 1 (1e-9), every sigma is symmetric with
  /// positive determinant and trace, and base >= 0.
  void validate() const;
};

/// Evaluates sum_i alpha_i exp(-0.5 (p - mu_i)^T Sigma_i^-1 (p - mu_i)) + base at each pixel
/// p = (row, col), clamped to [0, 1].
IlluminationMap compose_prompt(const LightPrompt& prompt, int height, int width);

}  // namespace illumdiff
