// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

#include "illumdiff/image.hpp"

namespace illumdiff {

using Rgb = std::array<double, 3>;

/// Scene frame: x along columns (right), y along rows (down), z toward the viewer.
/// Geometry is orthographic; pixel (row, col) samples the point (x = col, y = row).
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double dot(const Vec3& o) const noexcept { return x * o.x + y * o.y + z * o.z; }
  double norm() const noexcept;
  Vec3 normalized() const;
};

struct Sphere {
  double center_row = 0.0;
  double center_col = 0.0;
  double radius = 1.0;
};

/// Flat view-facing region of the backdrop covering pixels with
/// normal_row * row + normal_col * col >= offset.
struct HalfPlane {
  double normal_row = 0.0;
  double normal_col = 1.0;
  double offset = 0.0;
};

struct SceneObject {
  std::variant<Sphere, HalfPlane> shape;
  Rgb albedo{0.5, 0.5, 0.5};
};

struct SceneSpec {
  Rgb background_albedo{0.5, 0.5, 0.5};
  std::vector<SceneObject> objects;
  int height = 32;
  int width = 32;

  /// Throws ParameterError on albedos outside [0,1], non-positive radii or resolution.
  void validate() const;
};

struct DirectionalLight {
  Vec3 direction{0.0, 0.0, 1.0};  // unit, pointing toward the light
  double intensity = 0.8;
  double ambient = 0.2;

  /// Normalizes `toward_light` before storing it.
  static DirectionalLight make(Vec3 toward_light, double intensity, double ambient);
  void validate() const;
};

struct RenderOutput {
  ImageTensor image;        // H x W x 3, image = reflectance (.) shading
  ImageTensor reflectance;  // H x W x 3 albedo
  ImageTensor shading;      // H x W x 1
  ImageTensor normals;      // H x W x 3 unit normals, background faces the viewer
};

/// Lambertian render: shading = intensity * max(0, n . l) + ambient from the frontmost surface.
/// Half-planes lie on the backdrop (depth 0, later objects win); spheres bulge toward the viewer
/// and the nearest sphere surface wins.
RenderOutput render(const SceneSpec& spec, const DirectionalLight& light);

/// Recipe for a deterministic toy dataset. Item i is lit by lights[i % lights.size()] and uses
/// scene variant i / lights.size(), so each block of consecutive items shows one jittered scene
/// under every light.
struct DatasetRecipe {
  SceneSpec base;
  std::vector<DirectionalLight> lights;
  double albedo_jitter = 0.0;    // uniform +- per channel, clamped to [0,1]
  double position_jitter = 0.0;  // uniform +- px on sphere centers and half-plane offsets
  double radius_jitter = 0.0;    // uniform +- px on sphere radii, floored at 1 px
};

struct DatasetItem {
  ImageTensor image;
  std::size_t light_index = 0;
  std::size_t scene_index = 0;
  SceneSpec scene;
};

/// Scene variant `index` of the recipe for the given seed.
SceneSpec jittered_scene(const DatasetRecipe& recipe, std::uint64_t seed, std::size_t index);

std::vector<DatasetItem> make_dataset(std::uint64_t seed, std::size_t count, const DatasetRecipe& recipe);
std::vector<ImageTensor> dataset_images(const std::vector<DatasetItem>& items);

}  // namespace illumdiff
