// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "illumdiff/image.hpp"
#include "illumdiff/schedule.hpp"

namespace illumdiff {

/// Source of the marginal score grad_x log q_t(x) of the VP diffusion. Implementations are
/// immutable after construction and safe to share across threads.
class ScoreProvider {
 public:
  explicit ScoreProvider(VpSchedule schedule) : schedule_(schedule) {}
  virtual ~ScoreProvider() = default;

  /// Throws ParameterError unless t in (0, 1]; output has the shape of x.
  virtual ImageTensor score(const ImageTensor& x, double t) const = 0;
  /// Shape of the images this provider models.
  virtual Shape shape() const = 0;

  const VpSchedule& schedule() const noexcept { return schedule_; }

 protected:
  void check_input(const ImageTensor& x, double t) const;

 private:
  VpSchedule schedule_;
};

/// Data distribution N(mean, variance I): q_t = N(m mean, (m^2 variance + v) I).
class GaussianScore final : public ScoreProvider {
 public:
  GaussianScore(ImageTensor mean, double variance, VpSchedule schedule);

  ImageTensor score(const ImageTensor& x, double t) const override;
  Shape shape() const override { return mean_.shape(); }

  const ImageTensor& mean() const noexcept { return mean_; }
  double data_variance() const noexcept { return variance_; }

 private:
  ImageTensor mean_;
  double variance_;
};

/// Exact score of the diffused empirical distribution q_t = 1/N sum_i N(m x^i, s_t I) with
/// s_t = m^2 bandwidth^2 + v. Bandwidth 0 is the plain empirical distribution; a positive
/// bandwidth turns the data into a Gaussian kernel density, smooth down to t = 0.
class EmpiricalScore final : public ScoreProvider {
 public:
  EmpiricalScore(std::vector<ImageTensor> dataset, VpSchedule schedule, double bandwidth = 0.0);

  ImageTensor score(const ImageTensor& x, double t) const override;
  Shape shape() const override { return dataset_.front().shape(); }

  /// Softmax responsibilities of each data point for x at time t.
  std::vector<double> weights(const ImageTensor& x, double t) const;

  const std::vector<ImageTensor>& dataset() const noexcept { return dataset_; }
  double bandwidth() const noexcept { return bandwidth_; }

 private:
  std::vector<ImageTensor> dataset_;
  double bandwidth_;
};

/// Posterior mean E[x0 | x_t = x] = (x + v(t) score(x, t)) / m(t). Returns x unchanged at t = 0.
ImageTensor tweedie_denoise(const ImageTensor& x, double t, const ScoreProvider& score);

}  // namespace illumdiff
