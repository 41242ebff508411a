// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <memory>

#include "illumdiff/error.hpp"
#include "illumdiff/image_io.hpp"

namespace illumdiff::cli {

namespace {

std::string digest(const unsigned char* data, std::size_t n) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data, n) != 1 || EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw Error("sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) { return digest(bytes.data(), bytes.size()); }

std::string sha256_hex(const std::string& text) {
  return digest(reinterpret_cast<const unsigned char*>(text.data()), text.size());
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

nlohmann::json RunManifest::to_json() const {
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& o : outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
  nlohmann::json j;
  j["tool"] = tool;
  j["version"] = version;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["seeds"] = seeds;
  j["mode"] = reference ? "reference" : "parallel";
  j["threads"] = threads;
  j["outputs"] = outs;
  j["wall_clock_seconds"] = wall_clock_seconds ? nlohmann::json(*wall_clock_seconds) : nlohmann::json(nullptr);
  return j;
}

std::string config_hash(const nlohmann::json& config, const std::vector<std::uint64_t>& seeds) {
  const nlohmann::json doc = {{"config", config}, {"seeds", seeds}};
  return sha256_hex(doc.dump());
}

bool verify_manifest(const nlohmann::json& manifest, const std::filesystem::path& root, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (!manifest.contains("outputs") || !manifest.at("outputs").is_array()) return fail("no outputs list");
  for (const auto& o : manifest.at("outputs")) {
    const auto p = root / o.at("path").get<std::string>();
    if (!std::filesystem::exists(p)) return fail("missing " + p.string());
    if (sha256_file(p) != o.at("sha256").get<std::string>()) return fail("digest mismatch for " + p.string());
  }
  return true;
}

}  // namespace illumdiff::cli
