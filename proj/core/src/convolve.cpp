// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/convolve.hpp"

#include <cmath>
#include <numeric>

#include "illumdiff/error.hpp"

namespace illumdiff {

Kernel2D::Kernel2D(int radius, std::vector<double> taps) : radius_(radius), taps_(std::move(taps)) {
  if (radius < 0) throw ParameterError("kernel radius must be non-negative");
  const auto d = static_cast<std::size_t>(diameter());
  if (taps_.size() != d * d) {
    throw ParameterError("kernel of radius " + std::to_string(radius) + " needs " +
                         std::to_string(d * d) + " taps, got " + std::to_string(taps_.size()));
  }
}

double Kernel2D::sum() const noexcept { return std::accumulate(taps_.begin(), taps_.end(), 0.0); }

int default_radius(double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian sigma must be positive");
  return std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
}

Kernel2D gaussian_kernel(double sigma, int radius) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("gaussian sigma must be positive and finite, got " + std::to_string(sigma));
  }
  if (radius < 1) throw ParameterError("gaussian radius must be >= 1, got " + std::to_string(radius));

  const int d = 2 * radius + 1;
  const double inv = 1.0 / (2.0 * sigma * sigma);

  std::vector<double> factor(d);
  for (int i = -radius; i <= radius; ++i) factor[i + radius] = std::exp(-i * i * inv);
  const double factor_sum = std::accumulate(factor.begin(), factor.end(), 0.0);
  for (double& f : factor) f /= factor_sum;

  std::vector<double> taps(static_cast<std::size_t>(d) * d);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    for (int j = -radius; j <= radius; ++j) {
      const double v = std::exp(-(i * i + j * j) * inv);
      taps[static_cast<std::size_t>(i + radius) * d + (j + radius)] = v;
      total += v;
    }
  }
  for (double& t : taps) t /= total;

  Kernel2D k(radius, std::move(taps));
  k.factor_ = std::move(factor);
  return k;
}

int reflect_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

namespace {

// Precomputed reflected source index for every (output position, tap) pair along one axis.
// Entry [p * diameter + (q + r)] is reflect(p - q).
std::vector<int> reflect_table(int n, int radius) {
  const int d = 2 * radius + 1;
  std::vector<int> table(static_cast<std::size_t>(n) * d);
  for (int p = 0; p < n; ++p) {
    for (int q = -radius; q <= radius; ++q) table[static_cast<std::size_t>(p) * d + q + radius] = reflect_index(p - q, n);
  }
  return table;
}

enum class Axis { rows, cols };

// Forward 1D pass: out[p] = sum_q f[q] in[reflect(p - q)] along the axis.
ImageTensor pass_1d(const ImageTensor& in, std::span<const double> f, int radius, Axis axis) {
  const int h = in.height(), w = in.width(), c = in.channels();
  const int d = 2 * radius + 1;
  ImageTensor out = ImageTensor::like(in);
  if (axis == Axis::cols) {
    const auto table = reflect_table(w, radius);
    for (int r = 0; r < h; ++r) {
      for (int col = 0; col < w; ++col) {
        const int* src = &table[static_cast<std::size_t>(col) * d];
        for (int ch = 0; ch < c; ++ch) {
          double acc = 0.0;
          for (int k = 0; k < d; ++k) acc += f[k] * in.at(r, src[k], ch);
          out.at(r, col, ch) = acc;
        }
      }
    }
  } else {
    const auto table = reflect_table(h, radius);
    for (int r = 0; r < h; ++r) {
      const int* src = &table[static_cast<std::size_t>(r) * d];
      for (int col = 0; col < w; ++col) {
        for (int ch = 0; ch < c; ++ch) {
          double acc = 0.0;
          for (int k = 0; k < d; ++k) acc += f[k] * in.at(src[k], col, ch);
          out.at(r, col, ch) = acc;
        }
      }
    }
  }
  return out;
}

// Adjoint 1D pass: scatters in[p] * f[q] onto out[reflect(p - q)].
ImageTensor pass_1d_adjoint(const ImageTensor& in, std::span<const double> f, int radius, Axis axis) {
  const int h = in.height(), w = in.width(), c = in.channels();
  const int d = 2 * radius + 1;
  ImageTensor out = ImageTensor::like(in);
  if (axis == Axis::cols) {
    const auto table = reflect_table(w, radius);
    for (int r = 0; r < h; ++r) {
      for (int col = 0; col < w; ++col) {
        const int* dst = &table[static_cast<std::size_t>(col) * d];
        for (int ch = 0; ch < c; ++ch) {
          const double v = in.at(r, col, ch);
          for (int k = 0; k < d; ++k) out.at(r, dst[k], ch) += f[k] * v;
        }
      }
    }
  } else {
    const auto table = reflect_table(h, radius);
    for (int r = 0; r < h; ++r) {
      const int* dst = &table[static_cast<std::size_t>(r) * d];
      for (int col = 0; col < w; ++col) {
        for (int ch = 0; ch < c; ++ch) {
          const double v = in.at(r, col, ch);
          for (int k = 0; k < d; ++k) out.at(dst[k], col, ch) += f[k] * v;
        }
      }
    }
  }
  return out;
}

ImageTensor direct_2d(const ImageTensor& in, const Kernel2D& k) {
  const int h = in.height(), w = in.width(), c = in.channels(), rad = k.radius();
  const int d = k.diameter();
  const auto rows = reflect_table(h, rad);
  const auto cols = reflect_table(w, rad);
  ImageTensor out = ImageTensor::like(in);
  for (int r = 0; r < h; ++r) {
    for (int col = 0; col < w; ++col) {
      for (int ch = 0; ch < c; ++ch) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) {
          const int sr = rows[static_cast<std::size_t>(r) * d + i];
          for (int j = 0; j < d; ++j) {
            acc += k.taps()[static_cast<std::size_t>(i) * d + j] *
                   in.at(sr, cols[static_cast<std::size_t>(col) * d + j], ch);
          }
        }
        out.at(r, col, ch) = acc;
      }
    }
  }
  return out;
}

ImageTensor direct_2d_adjoint(const ImageTensor& in, const Kernel2D& k) {
  const int h = in.height(), w = in.width(), c = in.channels(), rad = k.radius();
  const int d = k.diameter();
  const auto rows = reflect_table(h, rad);
  const auto cols = reflect_table(w, rad);
  ImageTensor out = ImageTensor::like(in);
  for (int r = 0; r < h; ++r) {
    for (int col = 0; col < w; ++col) {
      for (int ch = 0; ch < c; ++ch) {
        const double v = in.at(r, col, ch);
        for (int i = 0; i < d; ++i) {
          const int dr = rows[static_cast<std::size_t>(r) * d + i];
          for (int j = 0; j < d; ++j) {
            out.at(dr, cols[static_cast<std::size_t>(col) * d + j], ch) +=
                k.taps()[static_cast<std::size_t>(i) * d + j] * v;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

ImageTensor convolve2d(const ImageTensor& img, const Kernel2D& kernel) {
  if (kernel.separable()) {
    return pass_1d(pass_1d(img, kernel.factor(), kernel.radius(), Axis::cols), kernel.factor(),
                   kernel.radius(), Axis::rows);
  }
  return direct_2d(img, kernel);
}

ImageTensor convolve2d_adjoint(const ImageTensor& img, const Kernel2D& kernel) {
  if (kernel.separable()) {
    return pass_1d_adjoint(pass_1d_adjoint(img, kernel.factor(), kernel.radius(), Axis::rows),
                           kernel.factor(), kernel.radius(), Axis::cols);
  }
  return direct_2d_adjoint(img, kernel);
}

}  // namespace illumdiff
