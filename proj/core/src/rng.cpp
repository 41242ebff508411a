// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/rng.hpp"

#include <cmath>
#include <numbers>

namespace illumdiff {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(mix64(seed + kGolden) ^ (stream * 0xD1B54A32D192ED03ull + 1))) {}

std::uint64_t CounterRng::next_u64() noexcept { return mix64(key_ + (++counter_) * kGolden); }

double CounterRng::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::normal() noexcept {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

ImageTensor CounterRng::normal_image(const Shape& shape) {
  ImageTensor out(shape.height, shape.width, shape.channels);
  for (double& v : out.data()) v = normal();
  return out;
}

ImageTensor CounterRng::uniform_image(const Shape& shape, double lo, double hi) {
  ImageTensor out(shape.height, shape.width, shape.channels);
  for (double& v : out.data()) v = uniform(lo, hi);
  return out;
}

}  // namespace illumdiff
