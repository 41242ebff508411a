// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "illumdiff/error.hpp"
#include "illumdiff/rng.hpp"

namespace illumdiff {

double Vec3::norm() const noexcept { return std::sqrt(dot(*this)); }

Vec3 Vec3::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ParameterError("cannot normalize a zero or non-finite vector");
  return {x / n, y / n, z / n};
}

namespace {

void check_albedo(const Rgb& albedo, const char* what) {
  for (double a : albedo) {
    if (!(a >= 0.0 && a <= 1.0)) throw ParameterError(std::string(what) + " albedo must lie in [0,1]");
  }
}

}  // namespace

void SceneSpec::validate() const {
  if (height <= 0 || width <= 0) throw ParameterError("scene resolution must be positive");
  check_albedo(background_albedo, "background");
  for (const auto& obj : objects) {
    check_albedo(obj.albedo, "object");
    if (const auto* s = std::get_if<Sphere>(&obj.shape)) {
      if (!(s->radius > 0.0)) throw ParameterError("sphere radius must be positive");
    } else {
      const auto& hp = std::get<HalfPlane>(obj.shape);
      if (hp.normal_row == 0.0 && hp.normal_col == 0.0) {
        throw ParameterError("half-plane normal must be non-zero");
      }
    }
  }
}

DirectionalLight DirectionalLight::make(Vec3 toward_light, double intensity, double ambient) {
  DirectionalLight light{toward_light.normalized(), intensity, ambient};
  light.validate();
  return light;
}

void DirectionalLight::validate() const {
  if (std::abs(direction.norm() - 1.0) > 1e-9) throw ParameterError("light direction must be a unit vector");
  if (!(intensity > 0.0)) throw ParameterError("light intensity must be positive");
  if (!(ambient >= 0.0)) throw ParameterError("light ambient must be non-negative");
  if (intensity + ambient > 1.0 + 1e-12) throw ParameterError("light intensity + ambient must not exceed 1");
}

RenderOutput render(const SceneSpec& spec, const DirectionalLight& light) {
  spec.validate();
  light.validate();
  const int h = spec.height, w = spec.width;
  RenderOutput out{ImageTensor(h, w, 3), ImageTensor(h, w, 3), ImageTensor(h, w, 1), ImageTensor(h, w, 3)};

  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      Vec3 normal{0.0, 0.0, 1.0};
      Rgb albedo = spec.background_albedo;
      double depth = 0.0;
      bool on_sphere = false;

      for (const auto& obj : spec.objects) {
        if (const auto* s = std::get_if<Sphere>(&obj.shape)) {
          const double dx = col - s->center_col;
          const double dy = row - s->center_row;
          const double d2 = dx * dx + dy * dy;
          const double r2 = s->radius * s->radius;
          if (d2 > r2) continue;
          const double z = std::sqrt(r2 - d2);
          if (on_sphere && z <= depth) continue;
          on_sphere = true;
          depth = z;
          normal = {dx / s->radius, dy / s->radius, z / s->radius};
          albedo = obj.albedo;
        } else if (!on_sphere) {
          const auto& hp = std::get<HalfPlane>(obj.shape);
          if (hp.normal_row * row + hp.normal_col * col >= hp.offset) albedo = obj.albedo;
        }
      }

      const double shade = light.intensity * std::max(0.0, normal.dot(light.direction)) + light.ambient;
      out.shading.at(row, col) = shade;
      out.normals.at(row, col, 0) = normal.x;
      out.normals.at(row, col, 1) = normal.y;
      out.normals.at(row, col, 2) = normal.z;
      for (int ch = 0; ch < 3; ++ch) {
        out.reflectance.at(row, col, ch) = albedo[ch];
        out.image.at(row, col, ch) = albedo[ch] * shade;
      }
    }
  }
  return out;
}

SceneSpec jittered_scene(const DatasetRecipe& recipe, std::uint64_t seed, std::size_t index) {
  SceneSpec spec = recipe.base;
  CounterRng rng(seed, index);
  auto jitter_albedo = [&](Rgb& a) {
    for (double& v : a) v = std::clamp(v + rng.uniform(-1.0, 1.0) * recipe.albedo_jitter, 0.0, 1.0);
  };
  jitter_albedo(spec.background_albedo);
  for (auto& obj : spec.objects) {
    jitter_albedo(obj.albedo);
    if (auto* s = std::get_if<Sphere>(&obj.shape)) {
      s->center_row += rng.uniform(-1.0, 1.0) * recipe.position_jitter;
      s->center_col += rng.uniform(-1.0, 1.0) * recipe.position_jitter;
      s->radius = std::max(1.0, s->radius + rng.uniform(-1.0, 1.0) * recipe.radius_jitter);
    } else {
      std::get<HalfPlane>(obj.shape).offset += rng.uniform(-1.0, 1.0) * recipe.position_jitter;
    }
  }
  return spec;
}

std::vector<DatasetItem> make_dataset(std::uint64_t seed, std::size_t count, const DatasetRecipe& recipe) {
  if (count == 0) throw ParameterError("dataset count must be at least 1");
  if (recipe.lights.empty()) throw ParameterError("dataset recipe needs at least one light");
  recipe.base.validate();

  std::vector<DatasetItem> items;
  items.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    DatasetItem item;
    item.light_index = i % recipe.lights.size();
    item.scene_index = i / recipe.lights.size();
    item.scene = jittered_scene(recipe, seed, item.scene_index);
    item.image = render(item.scene, recipe.lights[item.light_index]).image;
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<ImageTensor> dataset_images(const std::vector<DatasetItem>& items) {
  std::vector<ImageTensor> images;
  images.reserve(items.size());
  for (const auto& item : items) images.push_back(item.image);
  return images;
}

}  // namespace illumdiff
