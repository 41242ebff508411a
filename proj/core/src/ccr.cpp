// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/ccr.hpp"

#include <algorithm>
#include <cmath>

#include "illumdiff/error.hpp"

namespace illumdiff {

void CcrConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("ccr epsilon must be positive");
}

namespace {

constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};

void require_rgb(const ImageTensor& img, const char* what) {
  if (img.channels() != 3) {
    throw ShapeError(std::string(what) + " requires a 3-channel image, got " + img.shape().str());
  }
}

// p2 for p1 = (row, col); false when the pair would leave the image (border pairs with itself).
bool neighbour(const ImageTensor& img, Neighbor n, int row, int col, int& r2, int& c2) {
  r2 = row + (n == Neighbor::down ? 1 : 0);
  c2 = col + (n == Neighbor::right ? 1 : 0);
  return r2 < img.height() && c2 < img.width();
}

}  // namespace

CcrMap extract_ccr(const ImageTensor& img, const CcrConfig& cfg) {
  require_rgb(img, "extract_ccr");
  cfg.validate();
  const double eps = cfg.epsilon;
  auto floor_log = [eps](double v) { return std::log(std::max(v, 0.0) + eps); };

  CcrMap out(img.height(), img.width(), 3);
  for (int row = 0; row < img.height(); ++row) {
    for (int col = 0; col < img.width(); ++col) {
      int r2, c2;
      if (!neighbour(img, cfg.neighbor, row, col, r2, c2)) continue;
      double l1[3], l2[3];
      for (int ch = 0; ch < 3; ++ch) {
        l1[ch] = floor_log(img.at(row, col, ch));
        l2[ch] = floor_log(img.at(r2, c2, ch));
      }
      for (int k = 0; k < 3; ++k) {
        const int a = kPairs[k][0], b = kPairs[k][1];
        out.at(row, col, k) = (l1[a] + l2[b]) - (l2[a] + l1[b]);
      }
    }
  }
  return out;
}

ImageTensor extract_ccr_adjoint(const ImageTensor& img, const ImageTensor& cotangent, const CcrConfig& cfg) {
  require_rgb(img, "extract_ccr_adjoint");
  require_same_shape(img, cotangent, "extract_ccr_adjoint");
  cfg.validate();
  const double eps = cfg.epsilon;
  auto dlog = [eps](double v) { return v > 0.0 ? 1.0 / (v + eps) : 0.0; };

  ImageTensor grad = ImageTensor::like(img);
  for (int row = 0; row < img.height(); ++row) {
    for (int col = 0; col < img.width(); ++col) {
      int r2, c2;
      if (!neighbour(img, cfg.neighbor, row, col, r2, c2)) continue;
      for (int k = 0; k < 3; ++k) {
        const double g = cotangent.at(row, col, k);
        if (g == 0.0) continue;
        const int a = kPairs[k][0], b = kPairs[k][1];
        grad.at(row, col, a) += g * dlog(img.at(row, col, a));
        grad.at(r2, c2, b) += g * dlog(img.at(r2, c2, b));
        grad.at(r2, c2, a) -= g * dlog(img.at(r2, c2, a));
        grad.at(row, col, b) -= g * dlog(img.at(row, col, b));
      }
    }
  }
  return grad;
}

}  // namespace illumdiff
