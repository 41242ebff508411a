// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "illumdiff/error.hpp"
#include "illumdiff/presets.hpp"

namespace illumdiff::cli {

namespace {

std::string key_path(const std::string& path, const std::string& key) { return path + "." + key; }
std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  require_object(j, path);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(key_path(path, key), "unknown field");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
  return obj.contains(key) ? number(obj.at(key), key_path(path, key)) : fallback;
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long long>();
}

int int_or(const json& obj, const char* key, const std::string& path, int fallback) {
  if (!obj.contains(key)) return fallback;
  const long long v = integer(obj.at(key), key_path(path, key));
  if (v < -(1LL << 31) || v > (1LL << 31) - 1) throw ConfigError(key_path(path, key), "integer out of range");
  return static_cast<int>(v);
}

bool bool_or(const json& obj, const char* key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw ConfigError(key_path(path, key), "expected a boolean");
  return obj.at(key).get<bool>();
}

std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path, std::optional<std::size_t> length = {}) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  if (length && j.size() != *length) {
    throw ConfigError(path, "expected " + std::to_string(*length) + " numbers, got " + std::to_string(j.size()));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index_path(path, i)));
  return out;
}

Rgb rgb(const json& j, const std::string& path) {
  const auto v = numbers(j, path, 3);
  Rgb out{v[0], v[1], v[2]};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(out[i] >= 0.0 && out[i] <= 1.0)) throw ConfigError(index_path(path, i), "albedo must lie in [0, 1]");
  }
  return out;
}

std::filesystem::path existing_path(const json& j, const std::string& path, const std::filesystem::path& base) {
  std::filesystem::path p = string_at(j, path);
  if (p.is_relative() && !base.empty()) p = base / p;
  if (!std::filesystem::exists(p)) throw ConfigError(path, "path does not exist: " + p.string());
  return p;
}

// Runs a core validator and re-labels its ParameterError with the JSON path.
template <typename F>
void at_path(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

VpSchedule parse_schedule(const json& j, const std::string& path, const VpSchedule& fallback) {
  check_keys(j, path, {"beta_min", "beta_max", "steps"});
  const double bmin = number_or(j, "beta_min", path, fallback.beta_min());
  const double bmax = number_or(j, "beta_max", path, fallback.beta_max());
  const int steps = int_or(j, "steps", path, fallback.steps());
  VpSchedule out;
  at_path(path, [&] { out = VpSchedule(bmin, bmax, steps); });
  return out;
}

ProviderSpec parse_provider(const json& j, const std::string& path, const std::filesystem::path& base) {
  check_keys(j, path, {"kind", "dataset", "dataset_seed", "bandwidth", "mean", "mean_image", "variance"});
  ProviderSpec p;
  if (j.contains("kind")) {
    const std::string kind = string_at(j.at("kind"), key_path(path, "kind"));
    if (kind == "empirical") {
      p.kind = ProviderSpec::Kind::empirical;
    } else if (kind == "analytic") {
      p.kind = ProviderSpec::Kind::analytic;
    } else {
      throw ConfigError(key_path(path, "kind"), "expected \"empirical\" or \"analytic\"");
    }
  }
  if (j.contains("dataset")) {
    p.dataset = existing_path(j.at("dataset"), key_path(path, "dataset"), base);
    if (!std::filesystem::exists(*p.dataset / "dataset.json")) {
      throw ConfigError(key_path(path, "dataset"), "no dataset.json in " + p.dataset->string());
    }
  }
  if (j.contains("dataset_seed")) {
    const long long s = integer(j.at("dataset_seed"), key_path(path, "dataset_seed"));
    if (s < 0) throw ConfigError(key_path(path, "dataset_seed"), "seed must be non-negative");
    p.dataset_seed = static_cast<std::uint64_t>(s);
  }
  p.bandwidth = number_or(j, "bandwidth", path, p.bandwidth);
  if (p.bandwidth < 0.0) throw ConfigError(key_path(path, "bandwidth"), "must be non-negative");
  p.mean = number_or(j, "mean", path, p.mean);
  if (j.contains("mean_image")) p.mean_image = existing_path(j.at("mean_image"), key_path(path, "mean_image"), base);
  p.variance = number_or(j, "variance", path, p.variance);
  if (p.variance < 0.0) throw ConfigError(key_path(path, "variance"), "must be non-negative");
  return p;
}

DatasetRecipe parse_dataset(const json& j, const std::string& path, const SceneSpec& scene, int& count) {
  check_keys(j, path, {"count", "lights", "ring", "albedo_jitter", "position_jitter", "radius_jitter"});
  DatasetRecipe r = desk_recipe();
  r.base = scene;
  count = int_or(j, "count", path, count);
  if (count < 1) throw ConfigError(key_path(path, "count"), "must be at least 1");
  if (j.contains("lights") && j.contains("ring")) throw ConfigError(path, "give either lights or ring, not both");
  if (j.contains("lights")) {
    const auto& arr = j.at("lights");
    const std::string lp = key_path(path, "lights");
    if (!arr.is_array() || arr.empty()) throw ConfigError(lp, "expected a non-empty array of lights");
    r.lights.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) r.lights.push_back(parse_light(arr[i], index_path(lp, i)));
  }
  if (j.contains("ring")) {
    const auto& ring = j.at("ring");
    const std::string rp = key_path(path, "ring");
    check_keys(ring, rp, {"count", "elevation_deg", "intensity", "ambient"});
    const int n = int_or(ring, "count", rp, 8);
    const double elev = number_or(ring, "elevation_deg", rp, 70.0);
    const double inten = number_or(ring, "intensity", rp, 0.9);
    const double amb = number_or(ring, "ambient", rp, 0.1);
    at_path(rp, [&] { r.lights = ring_lights(n, elev, inten, amb); });
  }
  r.albedo_jitter = number_or(j, "albedo_jitter", path, r.albedo_jitter);
  r.position_jitter = number_or(j, "position_jitter", path, r.position_jitter);
  r.radius_jitter = number_or(j, "radius_jitter", path, r.radius_jitter);
  for (const char* k : {"albedo_jitter", "position_jitter", "radius_jitter"}) {
    if (j.contains(k) && j.at(k).get<double>() < 0.0) throw ConfigError(key_path(path, k), "must be non-negative");
  }
  return r;
}

RetinexConfig parse_retinex(const json& j, const std::string& path) {
  check_keys(j, path, {"scales", "weights", "channel_average"});
  std::vector<double> scales{1.0, 4.0, 16.0};
  std::vector<double> weights;
  if (j.contains("scales")) scales = numbers(j.at("scales"), key_path(path, "scales"));
  if (j.contains("weights")) weights = numbers(j.at("weights"), key_path(path, "weights"));
  const bool avg = bool_or(j, "channel_average", path, true);
  RetinexConfig out;
  at_path(path, [&] { out = RetinexConfig(scales, weights, avg); });
  return out;
}

CcrConfig parse_ccr(const json& j, const std::string& path) {
  check_keys(j, path, {"epsilon", "neighbor"});
  CcrConfig c;
  c.epsilon = number_or(j, "epsilon", path, c.epsilon);
  if (j.contains("neighbor")) {
    const std::string n = string_at(j.at("neighbor"), key_path(path, "neighbor"));
    if (n == "right") {
      c.neighbor = Neighbor::right;
    } else if (n == "down") {
      c.neighbor = Neighbor::down;
    } else {
      throw ConfigError(key_path(path, "neighbor"), "expected \"right\" or \"down\"");
    }
  }
  at_path(key_path(path, "epsilon"), [&] { c.validate(); });
  return c;
}

GuidanceParams parse_guidance(const json& j, const std::string& path) {
  check_keys(j, path, {"lambda_i", "lambda_r", "eval_point", "clip_factor"});
  GuidanceParams g;
  g.lambda_i = number_or(j, "lambda_i", path, g.lambda_i);
  g.lambda_r = number_or(j, "lambda_r", path, g.lambda_r);
  g.clip_factor = number_or(j, "clip_factor", path, g.clip_factor);
  if (g.lambda_i < 0.0) throw ConfigError(key_path(path, "lambda_i"), "must be non-negative");
  if (g.lambda_r < 0.0) throw ConfigError(key_path(path, "lambda_r"), "must be non-negative");
  if (g.clip_factor < 0.0) throw ConfigError(key_path(path, "clip_factor"), "must be non-negative");
  if (j.contains("eval_point")) {
    const std::string e = string_at(j.at("eval_point"), key_path(path, "eval_point"));
    if (e == "on_denoised") {
      g.eval_point = EvalPoint::on_denoised;
    } else if (e == "on_sample") {
      g.eval_point = EvalPoint::on_sample;
    } else {
      throw ConfigError(key_path(path, "eval_point"), "expected \"on_denoised\" or \"on_sample\"");
    }
  }
  return g;
}

GradcheckParams parse_gradcheck(const json& j, const std::string& path) {
  check_keys(j, path, {"size", "images", "h", "threshold"});
  GradcheckParams g;
  g.size = int_or(j, "size", path, g.size);
  g.images = int_or(j, "images", path, g.images);
  g.h = number_or(j, "h", path, g.h);
  g.threshold = number_or(j, "threshold", path, g.threshold);
  if (g.size < 2) throw ConfigError(key_path(path, "size"), "must be at least 2");
  if (g.images < 1) throw ConfigError(key_path(path, "images"), "must be at least 1");
  if (!(g.h > 0.0)) throw ConfigError(key_path(path, "h"), "must be positive");
  if (!(g.threshold > 0.0)) throw ConfigError(key_path(path, "threshold"), "must be positive");
  return g;
}

}  // namespace

DirectionalLight parse_light(const json& j, const std::string& path) {
  check_keys(j, path, {"direction", "intensity", "ambient"});
  DirectionalLight light;
  Vec3 dir = light.direction;
  if (j.contains("direction")) {
    const auto d = numbers(j.at("direction"), key_path(path, "direction"), 3);
    dir = {d[0], d[1], d[2]};
  }
  const double intensity = number_or(j, "intensity", path, light.intensity);
  const double ambient = number_or(j, "ambient", path, light.ambient);
  at_path(path, [&] { light = DirectionalLight::make(dir, intensity, ambient); });
  return light;
}

SceneSpec parse_scene(const json& j, const std::string& path) {
  check_keys(j, path, {"background_albedo", "objects", "resolution"});
  SceneSpec spec = desk_recipe().base;
  if (j.contains("background_albedo")) spec.background_albedo = rgb(j.at("background_albedo"), key_path(path, "background_albedo"));
  if (j.contains("resolution")) {
    const std::string rp = key_path(path, "resolution");
    const auto& r = j.at("resolution");
    if (!r.is_array() || r.size() != 2) throw ConfigError(rp, "expected [height, width]");
    const long long h = integer(r[0], index_path(rp, 0));
    const long long w = integer(r[1], index_path(rp, 1));
    if (h < 1 || w < 1 || h > 4096 || w > 4096) throw ConfigError(rp, "resolution must lie in [1, 4096]");
    spec.height = static_cast<int>(h);
    spec.width = static_cast<int>(w);
  }
  if (j.contains("objects")) {
    const std::string op = key_path(path, "objects");
    const auto& arr = j.at("objects");
    if (!arr.is_array()) throw ConfigError(op, "expected an array");
    spec.objects.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string ip = index_path(op, i);
      const auto& o = arr[i];
      check_keys(o, ip, {"sphere", "half_plane", "albedo"});
      SceneObject obj;
      if (o.contains("albedo")) obj.albedo = rgb(o.at("albedo"), key_path(ip, "albedo"));
      if (o.contains("sphere") == o.contains("half_plane")) throw ConfigError(ip, "expected exactly one of sphere or half_plane");
      if (o.contains("sphere")) {
        const std::string sp = key_path(ip, "sphere");
        const auto& s = o.at("sphere");
        check_keys(s, sp, {"center", "radius"});
        if (!s.contains("center") || !s.contains("radius")) throw ConfigError(sp, "sphere needs center and radius");
        const auto c = numbers(s.at("center"), key_path(sp, "center"), 2);
        const double radius = number(s.at("radius"), key_path(sp, "radius"));
        if (!(radius > 0.0)) throw ConfigError(key_path(sp, "radius"), "must be positive");
        obj.shape = Sphere{c[0], c[1], radius};
      } else {
        const std::string hp = key_path(ip, "half_plane");
        const auto& h = o.at("half_plane");
        check_keys(h, hp, {"normal", "offset"});
        if (!h.contains("normal") || !h.contains("offset")) throw ConfigError(hp, "half_plane needs normal and offset");
        const auto n = numbers(h.at("normal"), key_path(hp, "normal"), 2);
        if (n[0] == 0.0 && n[1] == 0.0) throw ConfigError(key_path(hp, "normal"), "must be non-zero");
        obj.shape = HalfPlane{n[0], n[1], number(h.at("offset"), key_path(hp, "offset"))};
      }
      spec.objects.push_back(obj);
    }
  }
  at_path(path, [&] { spec.validate(); });
  return spec;
}

LightPrompt parse_prompt(const json& j, const std::string& path) {
  check_keys(j, path, {"components", "base"});
  LightPrompt p;
  p.base = number_or(j, "base", path, p.base);
  const std::string cp = key_path(path, "components");
  if (!j.contains("components")) throw ConfigError(cp, "missing");
  const auto& arr = j.at("components");
  if (!arr.is_array() || arr.empty()) throw ConfigError(cp, "expected a non-empty array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string ip = index_path(cp, i);
    const auto& c = arr[i];
    check_keys(c, ip, {"alpha", "mu", "sigma"});
    for (const char* k : {"alpha", "mu", "sigma"}) {
      if (!c.contains(k)) throw ConfigError(key_path(ip, k), "missing");
    }
    GaussianLight g;
    g.alpha = number(c.at("alpha"), key_path(ip, "alpha"));
    const auto mu = numbers(c.at("mu"), key_path(ip, "mu"), 2);
    g.mu = {mu[0], mu[1]};
    const std::string sp = key_path(ip, "sigma");
    const auto& s = c.at("sigma");
    if (!s.is_array() || s.size() != 2) throw ConfigError(sp, "expected a 2x2 matrix");
    for (std::size_t r = 0; r < 2; ++r) {
      const auto row = numbers(s[r], index_path(sp, r), 2);
      g.sigma[r] = {row[0], row[1]};
    }
    p.components.push_back(g);
  }
  at_path(path, [&] { p.validate(); });
  return p;
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc, "$", {"schedule", "provider", "scene", "light", "dataset", "retinex", "ccr", "guidance", "prompt",
                        "seeds", "chains", "input", "output_dir", "refine_iterations", "gradcheck"});
  RunConfig cfg;
  cfg.source = doc;
  cfg.source.erase("output_dir");

  cfg.scene = desk_recipe().base;
  cfg.dataset = desk_recipe();
  cfg.light = desk_recipe().lights.front();

  if (doc.contains("schedule")) {
    cfg.schedule = parse_schedule(doc.at("schedule"), "$.schedule", cfg.schedule);
    cfg.schedule_given = doc.at("schedule").contains("steps");
  }
  if (doc.contains("provider")) cfg.provider = parse_provider(doc.at("provider"), "$.provider", base_dir);
  if (doc.contains("scene")) cfg.scene = parse_scene(doc.at("scene"), "$.scene");
  if (doc.contains("light")) cfg.light = parse_light(doc.at("light"), "$.light");
  cfg.dataset.base = cfg.scene;
  if (doc.contains("dataset")) cfg.dataset = parse_dataset(doc.at("dataset"), "$.dataset", cfg.scene, cfg.dataset_count);
  if (doc.contains("retinex")) cfg.retinex = parse_retinex(doc.at("retinex"), "$.retinex");
  if (doc.contains("ccr")) cfg.ccr = parse_ccr(doc.at("ccr"), "$.ccr");
  if (doc.contains("guidance")) {
    cfg.guidance = parse_guidance(doc.at("guidance"), "$.guidance");
    cfg.guidance_given = true;
  }
  if (doc.contains("prompt")) cfg.prompt = parse_prompt(doc.at("prompt"), "$.prompt");
  if (doc.contains("seeds")) {
    const auto& s = doc.at("seeds");
    if (!s.is_array() || s.empty()) throw ConfigError("$.seeds", "expected a non-empty array of seeds");
    cfg.seeds.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const long long v = integer(s[i], index_path("$.seeds", i));
      if (v < 0) throw ConfigError(index_path("$.seeds", i), "seed must be non-negative");
      cfg.seeds.push_back(static_cast<std::uint64_t>(v));
    }
  }
  cfg.chains = int_or(doc, "chains", "$", cfg.chains);
  if (cfg.chains < 1) throw ConfigError("$.chains", "must be at least 1");
  if (doc.contains("input")) cfg.input = existing_path(doc.at("input"), "$.input", base_dir);
  if (doc.contains("output_dir")) {
    std::filesystem::path out = string_at(doc.at("output_dir"), "$.output_dir");
    if (out.is_relative() && !base_dir.empty()) out = base_dir / out;
    cfg.output_dir = out;
  }
  cfg.refine_iterations = int_or(doc, "refine_iterations", "$", cfg.refine_iterations);
  if (cfg.refine_iterations < 0) throw ConfigError("$.refine_iterations", "must be non-negative");
  if (doc.contains("gradcheck")) cfg.gradcheck = parse_gradcheck(doc.at("gradcheck"), "$.gradcheck");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

json to_json(const SceneSpec& spec) {
  json objects = json::array();
  for (const auto& obj : spec.objects) {
    json o;
    o["albedo"] = obj.albedo;
    if (const auto* s = std::get_if<Sphere>(&obj.shape)) {
      o["sphere"] = {{"center", {s->center_row, s->center_col}}, {"radius", s->radius}};
    } else {
      const auto& h = std::get<HalfPlane>(obj.shape);
      o["half_plane"] = {{"normal", {h.normal_row, h.normal_col}}, {"offset", h.offset}};
    }
    objects.push_back(o);
  }
  return {{"background_albedo", spec.background_albedo}, {"objects", objects}, {"resolution", {spec.height, spec.width}}};
}

json to_json(const DirectionalLight& light) {
  return {{"direction", {light.direction.x, light.direction.y, light.direction.z}},
          {"intensity", light.intensity},
          {"ambient", light.ambient}};
}

json to_json(const LightPrompt& prompt) {
  json comps = json::array();
  for (const auto& c : prompt.components) {
    comps.push_back({{"alpha", c.alpha},
                     {"mu", c.mu},
                     {"sigma", {{c.sigma[0][0], c.sigma[0][1]}, {c.sigma[1][0], c.sigma[1][1]}}}});
  }
  return {{"components", comps}, {"base", prompt.base}};
}

json to_json(const RetinexConfig& cfg) {
  return {{"scales", cfg.scales()}, {"weights", cfg.weights()}, {"channel_average", cfg.channel_average()}};
}

json to_json(const CcrConfig& cfg) {
  return {{"epsilon", cfg.epsilon}, {"neighbor", cfg.neighbor == Neighbor::right ? "right" : "down"}};
}

json to_json(const VpSchedule& schedule) {
  return {{"beta_min", schedule.beta_min()}, {"beta_max", schedule.beta_max()}, {"steps", schedule.steps()}};
}

GuidanceConfig make_guidance(const RunConfig& cfg) {
  GuidanceConfig g;
  g.lambda_i = cfg.guidance.lambda_i;
  g.lambda_r = cfg.guidance.lambda_r;
  g.eval_point = cfg.guidance.eval_point;
  g.clip_factor = cfg.guidance.clip_factor;
  g.retinex = cfg.retinex;
  g.ccr = cfg.ccr;
  return g;
}

}  // namespace illumdiff::cli
