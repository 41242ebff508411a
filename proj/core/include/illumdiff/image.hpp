// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace illumdiff {

struct Shape {
  int height = 0;
  int width = 0;
  int channels = 0;

  std::size_t pixels() const noexcept { return static_cast<std::size_t>(height) * width; }
  std::size_t size() const noexcept { return pixels() * channels; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

/// Dense H x W x C grid of linear-light values, row-major with interleaved channels.
///
/// Elementwise arithmetic requires identical shapes and throws ShapeError otherwise.
/// Finiteness is not enforced on every mutation; operations that consume external data
/// call `require_finite()` and the samplers check each step.
class ImageTensor {
 public:
  ImageTensor() = default;
  ImageTensor(int height, int width, int channels, double fill = 0.0);
  ImageTensor(Shape shape, std::vector<double> data);

  static ImageTensor like(const ImageTensor& other, double fill = 0.0) {
    return ImageTensor(other.height(), other.width(), other.channels(), fill);
  }

  int height() const noexcept { return shape_.height; }
  int width() const noexcept { return shape_.width; }
  int channels() const noexcept { return shape_.channels; }
  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t index(int row, int col, int ch) const noexcept {
    return (static_cast<std::size_t>(row) * shape_.width + col) * shape_.channels + ch;
  }
  double& at(int row, int col, int ch = 0) noexcept { return data_[index(row, col, ch)]; }
  double at(int row, int col, int ch = 0) const noexcept { return data_[index(row, col, ch)]; }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool all_finite() const noexcept;
  /// Throws ParameterError naming `what` if any value is NaN or infinite.
  void require_finite(const char* what) const;

  ImageTensor channel(int ch) const;

  ImageTensor& operator+=(const ImageTensor& other);
  ImageTensor& operator-=(const ImageTensor& other);
  ImageTensor& operator*=(double scale) noexcept;
  /// this += scale * other
  ImageTensor& add_scaled(const ImageTensor& other, double scale);

  bool operator==(const ImageTensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

ImageTensor operator+(ImageTensor lhs, const ImageTensor& rhs);
ImageTensor operator-(ImageTensor lhs, const ImageTensor& rhs);
ImageTensor operator*(double scale, ImageTensor img);

/// Elementwise product of identically shaped tensors.
ImageTensor hadamard(const ImageTensor& a, const ImageTensor& b);
/// Multiplies every channel of `img` by the single-channel `map`.
ImageTensor modulate(const ImageTensor& img, const ImageTensor& map);

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* what);

double dot(const ImageTensor& a, const ImageTensor& b);
double squared_norm(const ImageTensor& img) noexcept;
double mean_squared_error(const ImageTensor& a, const ImageTensor& b);
/// Peak signal-to-noise ratio in dB for data with the given peak value.
double psnr(const ImageTensor& reference, const ImageTensor& test, double peak = 1.0);
/// Pearson correlation of all values of two identically shaped tensors.
double pearson(const ImageTensor& a, const ImageTensor& b);

}  // namespace illumdiff
