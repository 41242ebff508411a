// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "illumdiff/image.hpp"

namespace illumdiff {

// PPM (P6, maxval 255) holds sRGB-encoded display images; decoding maps them to linear light.
// PFM ("PF" 3-channel, "Pf" 1-channel) holds float32 linear maps verbatim, little-endian on write,
// rows stored bottom-to-top.

double srgb_decode(double encoded) noexcept;
double srgb_encode(double linear) noexcept;
double srgb_decode_byte(std::uint8_t value) noexcept;
std::uint8_t srgb_encode_byte(double linear) noexcept;

ImageTensor decode_image(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_pfm(const ImageTensor& img);
/// 1-channel images are replicated to gray. Values are clamped to [0, 1] before encoding.
std::vector<std::uint8_t> encode_ppm(const ImageTensor& img);

/// Dispatches on the file's magic number.
ImageTensor load_image(const std::filesystem::path& path);
/// Dispatches on the extension: ".ppm" or ".pfm".
void save_image(const ImageTensor& img, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace illumdiff
