// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "illumdiff/illumination.hpp"
#include "illumdiff/scene.hpp"

namespace illumdiff {

// Desk-scale defaults shared by the CLI, the test suites and the benchmarks.

/// `count` lights evenly spaced in azimuth, `elevation_deg` away from the view axis.
/// Light k points toward (cos phi_k, sin phi_k) in (col, row) with phi_k = 2 pi k / count,
/// so k = 0 lights from the right and k = count/2 from the left.
std::vector<DirectionalLight> ring_lights(int count, double elevation_deg, double intensity, double ambient);

/// 32 x 32 scene: two-tone dark backdrop, a floor strip and a bright sphere, jittered per
/// scene variant, lit by 8 ring lights at 70 degrees.
DatasetRecipe desk_recipe();

/// Single-Gaussian prompt bright on the image side facing azimuth `phi` (radians, same
/// convention as `ring_lights`), `reach` px from the center.
LightPrompt side_prompt(double phi, int height, int width, double reach = 10.0, double variance = 60.0,
                        double base = 0.1);

/// Prompt matching light k of `ring_lights(count, ...)`.
LightPrompt prompt_for_light(int k, int count, int height, int width);

}  // namespace illumdiff
