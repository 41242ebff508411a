// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/score.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "illumdiff/error.hpp"

namespace illumdiff {

void ScoreProvider::check_input(const ImageTensor& x, double t) const {
  if (!(t > 0.0 && t <= 1.0)) throw ParameterError("score time must lie in (0, 1], got " + std::to_string(t));
  if (x.shape() != shape()) throw ShapeError("score input is " + x.shape().str() + ", model is " + shape().str());
}

GaussianScore::GaussianScore(ImageTensor mean, double variance, VpSchedule schedule)
    : ScoreProvider(schedule), mean_(std::move(mean)), variance_(variance) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) throw ParameterError("data variance must be non-negative");
  mean_.require_finite("gaussian mean");
}

ImageTensor GaussianScore::score(const ImageTensor& x, double t) const {
  check_input(x, t);
  const double m = schedule().mean_coeff(t);
  const double s = m * m * variance_ + schedule().variance(t);
  ImageTensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (m * mean_[i] - x[i]) / s;
  return out;
}

EmpiricalScore::EmpiricalScore(std::vector<ImageTensor> dataset, VpSchedule schedule, double bandwidth)
    : ScoreProvider(schedule), dataset_(std::move(dataset)), bandwidth_(bandwidth) {
  if (dataset_.empty()) throw ParameterError("empirical score needs a non-empty dataset");
  if (!(bandwidth >= 0.0) || !std::isfinite(bandwidth)) throw ParameterError("bandwidth must be non-negative");
  for (const auto& img : dataset_) {
    if (img.shape() != dataset_.front().shape()) throw ShapeError("dataset images must share one shape");
    img.require_finite("dataset image");
  }
}

std::vector<double> EmpiricalScore::weights(const ImageTensor& x, double t) const {
  check_input(x, t);
  const double m = schedule().mean_coeff(t);
  const double s = m * m * bandwidth_ * bandwidth_ + schedule().variance(t);
  std::vector<double> logits(dataset_.size());
  for (std::size_t i = 0; i < dataset_.size(); ++i) {
    const auto& xi = dataset_[i];
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = x[j] - m * xi[j];
      d2 += d * d;
    }
    logits[i] = -d2 / (2.0 * s);
  }
  // log-sum-exp normalization
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l - top);
    total += l;
  }
  for (double& l : logits) l /= total;
  return logits;
}

ImageTensor EmpiricalScore::score(const ImageTensor& x, double t) const {
  const std::vector<double> w = weights(x, t);
  const double m = schedule().mean_coeff(t);
  const double s = m * m * bandwidth_ * bandwidth_ + schedule().variance(t);
  ImageTensor out = ImageTensor::like(x);
  for (std::size_t i = 0; i < dataset_.size(); ++i) {
    if (w[i] == 0.0) continue;
    out.add_scaled(dataset_[i], w[i] * m);
  }
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = (out[j] - x[j]) / s;
  return out;
}

ImageTensor tweedie_denoise(const ImageTensor& x, double t, const ScoreProvider& score) {
  if (t == 0.0) return x;
  const VpSchedule& sch = score.schedule();
  const double m = sch.mean_coeff(t);
  const double v = sch.variance(t);
  ImageTensor out = score.score(x, t);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (x[i] + v * out[i]) / m;
  return out;
}

}  // namespace illumdiff
