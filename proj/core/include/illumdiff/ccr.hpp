// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "illumdiff/image.hpp"

namespace illumdiff {

/// Which neighbour p2 pairs with each pixel p1.
enum class Neighbor { right, down };

struct CcrConfig {
  double epsilon = 1e-4;  // channel floor inside the logs
  Neighbor neighbor = Neighbor::right;

  void validate() const;
};

/// H x W x 3 log cross-color ratios (log M_RG, log M_RB, log M_GB).
using CcrMap = ImageTensor;

/// log M_ab = L(a1) + L(b2) - L(a2) - L(b1) with L(v) = log(max(v, 0) + epsilon), for channel
/// pairs (R,G), (R,B), (G,B). The last column (or row) pairs with itself and is zero.
CcrMap extract_ccr(const ImageTensor& img, const CcrConfig& cfg);

/// Pulls a cotangent on the CCR map back to the image: each ratio contributes
/// +-cotangent / (channel + epsilon) at p1 and p2. Channels at or below zero sit on the flat part
/// of the floor and receive no gradient.
ImageTensor extract_ccr_adjoint(const ImageTensor& img, const ImageTensor& cotangent, const CcrConfig& cfg);

}  // namespace illumdiff
