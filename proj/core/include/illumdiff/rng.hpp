// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "illumdiff/image.hpp"

namespace illumdiff {

/// Counter-based generator: draw i of stream (seed, stream) is splitmix64(key + i * golden).
/// Every chain owns its own stream, so parallel and sequential runs produce the same values
/// and the output is independent of the standard library's distribution implementations.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; caches the second variate.
  double normal() noexcept;

  ImageTensor normal_image(const Shape& shape);
  ImageTensor uniform_image(const Shape& shape, double lo, double hi);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace illumdiff
