// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "illumdiff/error.hpp"

namespace illumdiff {

double srgb_decode(double encoded) noexcept {
  if (encoded <= 0.04045) return encoded / 12.92;
  return std::pow((encoded + 0.055) / 1.055, 2.4);
}

double srgb_encode(double linear) noexcept {
  if (linear <= 0.0031308) return 12.92 * linear;
  return 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

double srgb_decode_byte(std::uint8_t value) noexcept { return srgb_decode(value / 255.0); }

std::uint8_t srgb_encode_byte(double linear) noexcept {
  const double clamped = std::isfinite(linear) ? std::clamp(linear, 0.0, 1.0) : 0.0;
  return static_cast<std::uint8_t>(std::lround(srgb_encode(clamped) * 255.0));
}

namespace {

// Netpbm-style header tokenizer: whitespace separated, '#' comments to end of line.
class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }

  std::string token(bool allow_comments) {
    skip_space(allow_comments);
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) ++pos_;
    if (start == pos_) throw FormatError("unexpected end of header", pos_);
    return std::string(bytes_.begin() + static_cast<std::ptrdiff_t>(start),
                       bytes_.begin() + static_cast<std::ptrdiff_t>(pos_));
  }

  int positive_int(const char* what, bool allow_comments) {
    const std::size_t start = pos_;
    const std::string t = token(allow_comments);
    if (!std::all_of(t.begin(), t.end(), [](unsigned char ch) { return std::isdigit(ch); }) ||
        t.size() > 9) {
      throw FormatError(std::string("invalid ") + what + " '" + t + "'", start);
    }
    const int v = std::stoi(t);
    if (v <= 0) throw FormatError(std::string(what) + " must be positive", start);
    return v;
  }

  // Exactly one whitespace byte separates the header from the payload.
  void end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError("missing whitespace after header", pos_);
    }
    ++pos_;
  }

 private:
  void skip_space(bool allow_comments) {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (allow_comments && bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

ImageTensor decode_ppm(const std::vector<std::uint8_t>& bytes) {
  HeaderReader hdr(bytes);
  hdr.token(true);  // magic, already checked
  const int width = hdr.positive_int("width", true);
  const int height = hdr.positive_int("height", true);
  const std::size_t maxval_at = hdr.offset();
  const int maxval = hdr.positive_int("maxval", true);
  if (maxval != 255) throw FormatError("unsupported PPM maxval " + std::to_string(maxval), maxval_at);
  hdr.end_of_header();

  const std::size_t start = hdr.offset();
  const std::size_t need = static_cast<std::size_t>(width) * height * 3;
  if (bytes.size() - start < need) {
    throw FormatError("truncated PPM payload: need " + std::to_string(need) + " bytes, have " +
                          std::to_string(bytes.size() - start),
                      bytes.size());
  }
  std::vector<double> data(need);
  for (std::size_t i = 0; i < need; ++i) data[i] = srgb_decode_byte(bytes[start + i]);
  return ImageTensor(Shape{height, width, 3}, std::move(data));
}

ImageTensor decode_pfm(const std::vector<std::uint8_t>& bytes, int channels) {
  HeaderReader hdr(bytes);
  hdr.token(false);
  const int width = hdr.positive_int("width", false);
  const int height = hdr.positive_int("height", false);
  const std::size_t scale_at = hdr.offset();
  const std::string scale_text = hdr.token(false);
  double scale = 0.0;
  try {
    std::size_t used = 0;
    scale = std::stod(scale_text, &used);
    if (used != scale_text.size()) throw std::invalid_argument(scale_text);
  } catch (const std::exception&) {
    throw FormatError("invalid PFM scale '" + scale_text + "'", scale_at);
  }
  if (scale == 0.0 || !std::isfinite(scale)) throw FormatError("PFM scale must be non-zero", scale_at);
  const bool little = scale < 0.0;
  hdr.end_of_header();

  const std::size_t start = hdr.offset();
  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() - start < count * 4) {
    throw FormatError("truncated PFM payload: need " + std::to_string(count * 4) + " bytes, have " +
                          std::to_string(bytes.size() - start),
                      bytes.size());
  }
  std::vector<double> data(count);
  const bool swap = little != (std::endian::native == std::endian::little);
  for (int file_row = 0; file_row < height; ++file_row) {
    const int row = height - 1 - file_row;
    for (int i = 0; i < width * channels; ++i) {
      const std::size_t at = start + (static_cast<std::size_t>(file_row) * width * channels + i) * 4;
      std::uint8_t raw[4];
      std::memcpy(raw, &bytes[at], 4);
      if (swap) std::swap(raw[0], raw[3]), std::swap(raw[1], raw[2]);
      float f;
      std::memcpy(&f, raw, 4);
      if (!std::isfinite(f)) throw FormatError("non-finite PFM sample", at);
      data[static_cast<std::size_t>(row) * width * channels + i] = f;
    }
  }
  return ImageTensor(Shape{height, width, channels}, std::move(data));
}

}  // namespace

ImageTensor decode_image(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2) throw FormatError("file too short for an image header", bytes.size());
  const char a = static_cast<char>(bytes[0]);
  const char b = static_cast<char>(bytes[1]);
  if (a == 'P' && b == '6') return decode_ppm(bytes);
  if (a == 'P' && b == 'F') return decode_pfm(bytes, 3);
  if (a == 'P' && b == 'f') return decode_pfm(bytes, 1);
  throw FormatError("unsupported image magic", 0);
}

std::vector<std::uint8_t> encode_pfm(const ImageTensor& img) {
  const std::string header = std::string(img.channels() == 3 ? "PF" : "Pf") + "\n" +
                             std::to_string(img.width()) + " " + std::to_string(img.height()) +
                             "\n-1.0\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const std::size_t row_len = static_cast<std::size_t>(img.width()) * img.channels();
  out.reserve(out.size() + img.size() * 4);
  for (int row = img.height() - 1; row >= 0; --row) {
    for (std::size_t i = 0; i < row_len; ++i) {
      const float f = static_cast<float>(img[static_cast<std::size_t>(row) * row_len + i]);
      std::uint8_t raw[4];
      std::memcpy(raw, &f, 4);
      if constexpr (std::endian::native == std::endian::big) std::swap(raw[0], raw[3]), std::swap(raw[1], raw[2]);
      out.insert(out.end(), raw, raw + 4);
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_ppm(const ImageTensor& img) {
  const std::string header =
      "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.shape().pixels() * 3);
  for (std::size_t p = 0; p < img.shape().pixels(); ++p) {
    for (int ch = 0; ch < 3; ++ch) {
      const int src = img.channels() == 3 ? ch : 0;
      out.push_back(srgb_encode_byte(img[p * img.channels() + src]));
    }
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

ImageTensor load_image(const std::filesystem::path& path) { return decode_image(read_file(path)); }

void save_image(const ImageTensor& img, const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".pfm") {
    write_file(path, encode_pfm(img));
  } else if (ext == ".ppm") {
    write_file(path, encode_ppm(img));
  } else {
    throw IoError("unsupported image extension '" + ext + "' for " + path.string());
  }
}

}  // namespace illumdiff
