// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/illumination.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "illumdiff/error.hpp"

namespace illumdiff {

RetinexConfig::RetinexConfig() : RetinexConfig({1.0, 4.0, 16.0}, {}, true) {}

RetinexConfig::RetinexConfig(std::vector<double> scales, std::vector<double> weights, bool channel_average)
    : scales_(std::move(scales)), weights_(std::move(weights)), channel_average_(channel_average) {
  if (scales_.empty()) throw ParameterError("retinex needs at least one scale");
  if (weights_.empty()) weights_.assign(scales_.size(), 1.0);
  if (weights_.size() != scales_.size()) {
    throw ParameterError("retinex has " + std::to_string(scales_.size()) + " scales but " +
                         std::to_string(weights_.size()) + " weights");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("retinex weights must be non-negative");
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (!(total > 0.0)) throw ParameterError("retinex weights must not all be zero");
  for (double& w : weights_) w /= total;
  kernels_.reserve(scales_.size());
  for (double s : scales_) kernels_.push_back(gaussian_kernel(s));
}

namespace {

void require_rgb(const ImageTensor& img, const char* what) {
  if (img.channels() != 3) {
    throw ShapeError(std::string(what) + " requires a 3-channel image, got " + img.shape().str());
  }
}

}  // namespace

IlluminationMap extract_illumination(const ImageTensor& img, const RetinexConfig& cfg) {
  require_rgb(img, "extract_illumination");
  const double channel_scale = cfg.channel_average() ? 1.0 / 3.0 : 1.0;

  // The blur is linear, so summing channels first equals blurring each and summing.
  ImageTensor summed(img.height(), img.width(), 1);
  for (std::size_t p = 0; p < summed.size(); ++p) {
    summed[p] = channel_scale * (img[3 * p] + img[3 * p + 1] + img[3 * p + 2]);
  }

  IlluminationMap out = ImageTensor::like(summed);
  for (std::size_t k = 0; k < cfg.kernels().size(); ++k) {
    if (cfg.weights()[k] == 0.0) continue;
    out.add_scaled(convolve2d(summed, cfg.kernels()[k]), cfg.weights()[k]);
  }
  return out;
}

ImageTensor extract_illumination_adjoint(const IlluminationMap& cotangent, const RetinexConfig& cfg) {
  if (cotangent.channels() != 1) throw ShapeError("illumination cotangent must be single-channel");
  ImageTensor pulled = ImageTensor::like(cotangent);
  for (std::size_t k = 0; k < cfg.kernels().size(); ++k) {
    if (cfg.weights()[k] == 0.0) continue;
    pulled.add_scaled(convolve2d_adjoint(cotangent, cfg.kernels()[k]), cfg.weights()[k]);
  }
  const double channel_scale = cfg.channel_average() ? 1.0 / 3.0 : 1.0;
  ImageTensor out(cotangent.height(), cotangent.width(), 3);
  for (std::size_t p = 0; p < pulled.size(); ++p) {
    const double v = channel_scale * pulled[p];
    out[3 * p] = v;
    out[3 * p + 1] = v;
    out[3 * p + 2] = v;
  }
  return out;
}

void LightPrompt::validate() const {
  if (components.empty()) throw ParameterError("light prompt needs at least one component");
  if (!(base >= 0.0) || !std::isfinite(base)) throw ParameterError("light prompt base must be non-negative");
  double alpha_sum = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    const auto& s = c.sigma;
    const std::string where = "light prompt component " + std::to_string(i);
    if (!std::isfinite(c.alpha) || !std::isfinite(c.mu[0]) || !std::isfinite(c.mu[1])) {
      throw ParameterError(where + " has non-finite parameters");
    }
    if (s[0][1] != s[1][0]) throw ParameterError(where + ": sigma must be symmetric");
    const double det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    const double trace = s[0][0] + s[1][1];
    if (!(det > 0.0) || !(trace > 0.0)) throw ParameterError(where + ": sigma must be positive definite");
    alpha_sum += c.alpha;
  }
  if (std::abs(alpha_sum - 1.0) > 1e-9) {
    throw ParameterError("light prompt alphas must sum to 1, got " + std::to_string(alpha_sum));
  }
}

IlluminationMap compose_prompt(const LightPrompt& prompt, int height, int width) {
  prompt.validate();
  IlluminationMap out(height, width, 1, prompt.base);
  for (const auto& c : prompt.components) {
    const auto& s = c.sigma;
    const double det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    // Inverse of the 2x2 covariance.
    const double i00 = s[1][1] / det, i01 = -s[0][1] / det, i11 = s[0][0] / det;
    for (int row = 0; row < height; ++row) {
      for (int col = 0; col < width; ++col) {
        const double dr = row - c.mu[0];
        const double dc = col - c.mu[1];
        const double q = dr * (i00 * dr + i01 * dc) + dc * (i01 * dr + i11 * dc);
        out.at(row, col) += c.alpha * std::exp(-0.5 * q);
      }
    }
  }
  for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

}  // namespace illumdiff
