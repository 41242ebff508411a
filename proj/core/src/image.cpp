// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "illumdiff/error.hpp"

namespace illumdiff {

std::string Shape::str() const {
  return std::to_string(height) + "x" + std::to_string(width) + "x" + std::to_string(channels);
}

namespace {

void check_dims(int height, int width, int channels) {
  if (height <= 0 || width <= 0) {
    throw ShapeError("image dimensions must be positive, got " + std::to_string(height) + "x" +
                     std::to_string(width));
  }
  if (channels != 1 && channels != 3) {
    throw ShapeError("image channels must be 1 or 3, got " + std::to_string(channels));
  }
}

}  // namespace

ImageTensor::ImageTensor(int height, int width, int channels, double fill)
    : shape_{height, width, channels} {
  check_dims(height, width, channels);
  data_.assign(shape_.size(), fill);
}

ImageTensor::ImageTensor(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  check_dims(shape.height, shape.width, shape.channels);
  if (data_.size() != shape_.size()) {
    throw ShapeError("data length " + std::to_string(data_.size()) + " does not match shape " +
                     shape_.str());
  }
}

bool ImageTensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void ImageTensor::require_finite(const char* what) const {
  if (!all_finite()) throw ParameterError(std::string(what) + " contains non-finite values");
}

ImageTensor ImageTensor::channel(int ch) const {
  if (ch < 0 || ch >= channels()) throw ShapeError("channel index out of range");
  ImageTensor out(height(), width(), 1);
  for (std::size_t p = 0; p < shape_.pixels(); ++p) out.data_[p] = data_[p * channels() + ch];
  return out;
}

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape().str() + " vs " +
                     b.shape().str());
  }
}

ImageTensor& ImageTensor::operator+=(const ImageTensor& other) {
  require_same_shape(*this, other, "add");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ImageTensor& ImageTensor::operator-=(const ImageTensor& other) {
  require_same_shape(*this, other, "subtract");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ImageTensor& ImageTensor::operator*=(double scale) noexcept {
  for (double& v : data_) v *= scale;
  return *this;
}

ImageTensor& ImageTensor::add_scaled(const ImageTensor& other, double scale) {
  require_same_shape(*this, other, "add_scaled");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
  return *this;
}

ImageTensor operator+(ImageTensor lhs, const ImageTensor& rhs) { return lhs += rhs; }
ImageTensor operator-(ImageTensor lhs, const ImageTensor& rhs) { return lhs -= rhs; }
ImageTensor operator*(double scale, ImageTensor img) { return img *= scale; }

ImageTensor hadamard(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b, "hadamard");
  ImageTensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

ImageTensor modulate(const ImageTensor& img, const ImageTensor& map) {
  if (map.channels() != 1 || map.height() != img.height() || map.width() != img.width()) {
    throw ShapeError("modulate: expected a " + std::to_string(img.height()) + "x" +
                     std::to_string(img.width()) + "x1 map, got " + map.shape().str());
  }
  ImageTensor out = img;
  const int c = img.channels();
  for (std::size_t p = 0; p < img.shape().pixels(); ++p) {
    for (int ch = 0; ch < c; ++ch) out[p * c + ch] *= map[p];
  }
  return out;
}

double dot(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm(const ImageTensor& img) noexcept {
  double acc = 0.0;
  for (double v : img.data()) acc += v * v;
  return acc;
}

double mean_squared_error(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b, "mean_squared_error");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double psnr(const ImageTensor& reference, const ImageTensor& test, double peak) {
  const double mse = mean_squared_error(reference, test);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double pearson(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b, "pearson");
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) return 0.0;
  return cov / std::sqrt(var_a * var_b);
}

}  // namespace illumdiff
