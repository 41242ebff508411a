// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/energy.hpp"

#include <algorithm>
#include <cmath>

#include "illumdiff/error.hpp"

namespace illumdiff {

void GuidanceConfig::validate(const Shape& image_shape) const {
  if (!(lambda_i >= 0.0) || !std::isfinite(lambda_i)) throw ParameterError("lambda_i must be non-negative");
  if (!(lambda_r >= 0.0) || !std::isfinite(lambda_r)) throw ParameterError("lambda_r must be non-negative");
  if (!(clip_factor >= 0.0)) throw ParameterError("clip_factor must be non-negative");
  ccr.validate();
  if (image_shape.channels != 3) throw ShapeError("guidance requires 3-channel images");
  const Shape illum_shape{image_shape.height, image_shape.width, 1};
  if (target_illum.shape() != illum_shape) {
    throw ShapeError("illumination target is " + target_illum.shape().str() + ", expected " + illum_shape.str());
  }
  if (target_ccr) {
    if (target_ccr->shape() != image_shape) {
      throw ShapeError("ccr target is " + target_ccr->shape().str() + ", expected " + image_shape.str());
    }
  } else if (lambda_r > 0.0) {
    throw ParameterError("lambda_r > 0 requires a ccr target");
  }
}

EnergyBreakdown eval_energy(const ImageTensor& x, const GuidanceConfig& cfg) {
  cfg.validate(x.shape());
  EnergyBreakdown e;
  e.illum_term = mean_squared_error(extract_illumination(x, cfg.retinex), cfg.target_illum);
  if (cfg.target_ccr) e.geom_term = mean_squared_error(extract_ccr(x, cfg.ccr), *cfg.target_ccr);
  e.total = cfg.lambda_i * e.illum_term + cfg.lambda_r * e.geom_term;
  return e;
}

ImageTensor grad_energy(const ImageTensor& x, const GuidanceConfig& cfg) {
  cfg.validate(x.shape());
  ImageTensor grad = ImageTensor::like(x);

  if (cfg.lambda_i != 0.0) {
    // d/df mean((f - y)^2) = 2 (f - y) / HW
    ImageTensor residual = extract_illumination(x, cfg.retinex) - cfg.target_illum;
    residual *= 2.0 * cfg.lambda_i / static_cast<double>(residual.size());
    grad += extract_illumination_adjoint(residual, cfg.retinex);
  }
  if (cfg.lambda_r != 0.0) {
    ImageTensor residual = extract_ccr(x, cfg.ccr) - *cfg.target_ccr;
    residual *= 2.0 * cfg.lambda_r / static_cast<double>(residual.size());
    grad += extract_ccr_adjoint(x, residual, cfg.ccr);
  }
  return grad;
}

ImageTensor fd_gradient(const std::function<double(const ImageTensor&)>& f, const ImageTensor& x, double h) {
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  ImageTensor grad = ImageTensor::like(x);
  ImageTensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

ImageTensor fd_gradient(const ImageTensor& x, const GuidanceConfig& cfg, double h) {
  cfg.validate(x.shape());
  return fd_gradient([&cfg](const ImageTensor& p) { return eval_energy(p, cfg).total; }, x, h);
}

double relative_l2_error(const ImageTensor& a, const ImageTensor& b) {
  const double denom = std::sqrt(squared_norm(b));
  const double num = std::sqrt(squared_norm(a - b));
  return num / std::max(denom, 1e-300);
}

}  // namespace illumdiff
