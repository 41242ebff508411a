// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace illumdiff {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Out-of-domain scalar or structural parameter (sigma <= 0, non-SPD covariance, t outside [0,1]).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Tensor dimensions or channel counts do not match what an operation requires.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed image file. `offset()` is the byte position where decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Non-finite values appeared during iterative sampling.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace illumdiff
