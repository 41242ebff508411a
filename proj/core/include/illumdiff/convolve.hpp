// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "illumdiff/image.hpp"

namespace illumdiff {

/// Square (2r+1) x (2r+1) kernel addressed by signed offsets in [-r, r].
///
/// Kernels built by `gaussian_kernel` also carry their normalized 1D factor;
/// `convolve2d` then runs two separable passes instead of the full 2D sum.
class Kernel2D {
 public:
  Kernel2D() = default;
  Kernel2D(int radius, std::vector<double> taps);

  int radius() const noexcept { return radius_; }
  int diameter() const noexcept { return 2 * radius_ + 1; }
  double tap(int di, int dj) const noexcept {
    return taps_[static_cast<std::size_t>(di + radius_) * diameter() + (dj + radius_)];
  }
  std::span<const double> taps() const noexcept { return taps_; }

  bool separable() const noexcept { return !factor_.empty(); }
  std::span<const double> factor() const noexcept { return factor_; }

  double sum() const noexcept;

 private:
  friend Kernel2D gaussian_kernel(double sigma, int radius);

  int radius_ = 0;
  std::vector<double> taps_{1.0};
  std::vector<double> factor_;
};

/// ceil(3 sigma): keeps more than 99.7% of the Gaussian mass.
int default_radius(double sigma);

/// Taps proportional to exp(-(i^2 + j^2) / (2 sigma^2)), renormalized to sum to one.
Kernel2D gaussian_kernel(double sigma, int radius);
inline Kernel2D gaussian_kernel(double sigma) { return gaussian_kernel(sigma, default_radius(sigma)); }

/// Mirror index into [0, n) without repeating the edge sample (… 2 1 | 0 1 2 … n-1 | n-2 …).
int reflect_index(int i, int n) noexcept;

/// Per-channel 2D convolution with reflect padding. Output shape equals input shape.
ImageTensor convolve2d(const ImageTensor& img, const Kernel2D& kernel);

/// Adjoint of `convolve2d` under the Euclidean inner product: <K x, y> = <x, K* y>.
/// Reflect padding folds boundary taps back onto interior pixels, so K* differs from K
/// near the border even for symmetric kernels.
ImageTensor convolve2d_adjoint(const ImageTensor& img, const Kernel2D& kernel);

}  // namespace illumdiff
