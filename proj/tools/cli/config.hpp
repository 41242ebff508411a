// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "illumdiff/energy.hpp"
#include "illumdiff/error.hpp"
#include "illumdiff/scene.hpp"
#include "illumdiff/schedule.hpp"

namespace illumdiff::cli {

using nlohmann::json;

/// Invalid run configuration. `path()` is the JSON path of the offending value, e.g.
/// "$.guidance.lambda_i".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct ProviderSpec {
  enum class Kind { empirical, analytic } kind = Kind::empirical;
  std::optional<std::filesystem::path> dataset;  // directory written by `illumdiff dataset`
  std::uint64_t dataset_seed = 1;                // used when `dataset` is absent
  double bandwidth = 0.0;
  // analytic provider: N(mean, variance I); `mean_image` overrides the constant `mean`
  double mean = 0.5;
  std::optional<std::filesystem::path> mean_image;
  double variance = 0.01;
};

struct GuidanceParams {
  double lambda_i = 100.0;
  double lambda_r = 50.0;
  EvalPoint eval_point = EvalPoint::on_denoised;
  double clip_factor = 10.0;
};

struct GradcheckParams {
  int size = 8;
  int images = 10;
  double h = 1e-3;
  double threshold = 1e-4;
};

/// Parsed, validated command configuration. Every section is optional and falls back to the
/// desk-scale defaults; commands check for the sections they require.
struct RunConfig {
  json source = json::object();  // the document as given, minus output_dir

  VpSchedule schedule{0.1, 20.0, 200};
  bool schedule_given = false;
  ProviderSpec provider;
  SceneSpec scene;
  DirectionalLight light;
  DatasetRecipe dataset;
  int dataset_count = 64;
  RetinexConfig retinex;
  CcrConfig ccr;
  GuidanceParams guidance;
  bool guidance_given = false;
  std::optional<LightPrompt> prompt;
  std::vector<std::uint64_t> seeds{0};
  int chains = 1;
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> output_dir;
  int refine_iterations = 4;
  GradcheckParams gradcheck;
};

/// Strict parse: unknown keys, wrong types and out-of-domain values raise ConfigError;
/// referenced paths must exist. Relative paths resolve against `base_dir`.
RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

LightPrompt parse_prompt(const json& doc, const std::string& path = "$");
SceneSpec parse_scene(const json& doc, const std::string& path = "$");
DirectionalLight parse_light(const json& doc, const std::string& path = "$");

json to_json(const SceneSpec& spec);
json to_json(const DirectionalLight& light);
json to_json(const LightPrompt& prompt);
json to_json(const RetinexConfig& cfg);
json to_json(const CcrConfig& cfg);
json to_json(const VpSchedule& schedule);

/// Guidance with the run's weights and extraction settings; targets left empty.
GuidanceConfig make_guidance(const RunConfig& cfg);

}  // namespace illumdiff::cli
