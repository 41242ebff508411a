// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "illumdiff/presets.hpp"

#include <cmath>
#include <numbers>

#include "illumdiff/error.hpp"

namespace illumdiff {

std::vector<DirectionalLight> ring_lights(int count, double elevation_deg, double intensity, double ambient) {
  if (count < 1) throw ParameterError("ring_lights needs at least one light");
  const double theta = elevation_deg * std::numbers::pi / 180.0;
  std::vector<DirectionalLight> lights;
  lights.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / count;
    lights.push_back(DirectionalLight::make(
        {std::cos(phi) * std::sin(theta), std::sin(phi) * std::sin(theta), std::cos(theta)}, intensity, ambient));
  }
  return lights;
}

DatasetRecipe desk_recipe() {
  DatasetRecipe r;
  r.base.height = 32;
  r.base.width = 32;
  r.base.background_albedo = {0.28, 0.2, 0.14};
  r.base.objects.push_back({HalfPlane{0.0, 1.0, 16.0}, {0.14, 0.2, 0.3}});
  r.base.objects.push_back({HalfPlane{1.0, 0.0, 25.0}, {0.3, 0.28, 0.12}});
  r.base.objects.push_back({Sphere{15.0, 16.0, 10.0}, {0.9, 0.75, 0.6}});
  r.lights = ring_lights(8, 70.0, 0.9, 0.1);
  r.albedo_jitter = 0.06;
  r.position_jitter = 3.0;
  r.radius_jitter = 2.0;
  return r;
}

LightPrompt side_prompt(double phi, int height, int width, double reach, double variance, double base) {
  GaussianLight g;
  g.alpha = 1.0;
  g.mu = {0.5 * height + reach * std::sin(phi), 0.5 * width + reach * std::cos(phi)};
  g.sigma = {{{variance, 0.0}, {0.0, variance}}};
  LightPrompt p;
  p.components.push_back(g);
  p.base = base;
  return p;
}

LightPrompt prompt_for_light(int k, int count, int height, int width) {
  return side_prompt(2.0 * std::numbers::pi * k / count, height, width);
}

}  // namespace illumdiff
