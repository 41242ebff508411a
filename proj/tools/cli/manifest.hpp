// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace illumdiff::cli {

std::string sha256_hex(const std::vector<std::uint8_t>& bytes);
std::string sha256_hex(const std::string& text);
std::string sha256_file(const std::filesystem::path& path);

struct ManifestOutput {
  std::string path;  // relative to the output directory, '/' separated
  std::string sha256;
};

struct RunManifest {
  std::string tool = "illumdiff";
  std::string version;
  std::string command;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  bool reference = false;
  int threads = 1;
  std::vector<ManifestOutput> outputs;
  std::optional<double> wall_clock_seconds;  // omitted (null) in reference mode

  nlohmann::json to_json() const;
};

/// Digest of the canonical (sorted-key) serialization plus the effective seed list.
std::string config_hash(const nlohmann::json& config, const std::vector<std::uint64_t>& seeds);

/// Checks that every listed output exists under `root` with the recorded digest.
bool verify_manifest(const nlohmann::json& manifest, const std::filesystem::path& root, std::string* why = nullptr);

}  // namespace illumdiff::cli
