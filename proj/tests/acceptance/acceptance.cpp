// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

// Desk-scale acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "illumdiff/ccr.hpp"
#include "illumdiff/ddim.hpp"
#include "illumdiff/energy.hpp"
#include "illumdiff/image_io.hpp"
#include "illumdiff/pipeline.hpp"
#include "illumdiff/presets.hpp"
#include "illumdiff/rng.hpp"
#include "illumdiff/sampler.hpp"
#include "illumdiff/score.hpp"

namespace fs = std::filesystem;
using namespace illumdiff;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void info(const std::string& s) { std::printf("    %s\n", s.c_str()); }

const DatasetRecipe& recipe() {
  static const DatasetRecipe r = desk_recipe();
  return r;
}

double illum_mse(const ImageTensor& img, const GuidanceConfig& g) {
  return mean_squared_error(extract_illumination(img, g.retinex), g.target_illum);
}

Outcome guidance_efficacy() {
  const VpSchedule sched(0.1, 20.0, 200);
  const EmpiricalScore score(dataset_images(make_dataset(1, 64, recipe())), sched);
  const GuidanceConfig g = illumination_guidance(side_prompt(std::numbers::pi, 32, 32), {32, 32, 3}, 100.0);
  double guided = 0.0;
  double plain = 0.0;
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    guided += illum_mse(reverse_sample_guided(score, &g, sched, seed).final, g);
    plain += illum_mse(reverse_sample_guided(score, nullptr, sched, seed).final, g);
  }
  guided /= 16.0;
  plain /= 16.0;
  const double ratio = guided / plain;
  return {ratio <= 0.8, "mean S_I guided " + fmt("%.5f", guided) + " / unguided " + fmt("%.5f", plain) +
                            " = " + fmt("%.3f", ratio) + " (<= 0.8)"};
}

Outcome ccr_invariance() {
  const SceneSpec& scene = recipe().base;
  const auto lights = ring_lights(8, 60.0, 0.8, 0.2);
  const CcrConfig cfg;
  double worst_mean = 0.0;
  for (int k = 1; k < 8; ++k) {
    const RenderOutput a = render(scene, lights[0]);
    const RenderOutput b = render(scene, lights[k]);
    const auto ma = extract_ccr(a.image, cfg);
    const auto mb = extract_ccr(b.image, cfg);
    auto lit = [&](const RenderOutput& r, const DirectionalLight& l, int i, int j) {
      const Vec3 n{r.normals.at(i, j, 0), r.normals.at(i, j, 1), r.normals.at(i, j, 2)};
      return n.dot(l.direction) > 0.0;
    };
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < scene.height; ++i) {
      for (int j = 0; j + 1 < scene.width; ++j) {
        if (!(lit(a, lights[0], i, j) && lit(a, lights[0], i, j + 1) && lit(b, lights[k], i, j) &&
              lit(b, lights[k], i, j + 1))) {
          continue;
        }
        for (int ch = 0; ch < 3; ++ch) sum += std::abs(ma.at(i, j, ch) - mb.at(i, j, ch));
        count += 3;
      }
    }
    worst_mean = std::max(worst_mean, sum / count);
  }
  const ImageTensor img = render(scene, lights[2]).image;
  double worst_scale = 0.0;
  for (double c : {0.5, 0.1, 1.7}) {
    CcrConfig scaled = cfg;
    scaled.epsilon = cfg.epsilon * c;
    const auto ref = extract_ccr(img, cfg);
    const auto got = extract_ccr(c * img, scaled);
    for (std::size_t i = 0; i < ref.size(); ++i) worst_scale = std::max(worst_scale, std::abs(ref[i] - got[i]));
  }
  return {worst_mean < 0.05 && worst_scale < 1e-9, "light change mean |dlogCCR| " + fmt("%.3g", worst_mean) +
                                                     " (< 0.05), rescale max " + fmt("%.3g", worst_scale) +
                                                     " (< 1e-9)"};
}

Outcome gradient_correctness() {
  const Shape shape{8, 8, 3};
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    CounterRng rng(3, i);
    const ImageTensor x = rng.uniform_image(shape, 0.1, 0.9);
    GuidanceConfig g;
    g.target_illum = compose_prompt(side_prompt(std::numbers::pi, 8, 8, 3.0, 6.0), 8, 8);
    g.target_ccr = extract_ccr(rng.uniform_image(shape, 0.1, 0.9), g.ccr);
    worst = std::max(worst, relative_l2_error(grad_energy(x, g), fd_gradient(x, g, 1e-3)));
  }
  return {worst < 1e-4, "max relative L2 error " + fmt("%.3g", worst) + " over 10 images (< 1e-4)"};
}

Outcome perturbation_moments() {
  const VpSchedule sched(0.1, 20.0, 200);
  CounterRng init(4, 0);
  const ImageTensor x0 = init.uniform_image({2, 2, 3}, 0.0, 1.0);
  const int n = 100000;
  double worst_z = 0.0;
  double worst_var = 0.0;
  for (double t : {0.25, 0.5, 0.75}) {
    CounterRng rng(4, static_cast<std::uint64_t>(t * 100));
    std::vector<double> s(x0.size(), 0.0);
    std::vector<double> s2(x0.size(), 0.0);
    for (int k = 0; k < n; ++k) {
      const ImageTensor x = perturb(x0, t, sched, rng);
      for (std::size_t i = 0; i < x.size(); ++i) {
        s[i] += x[i];
        s2[i] += x[i] * x[i];
      }
    }
    const double m = sched.mean_coeff(t);
    const double v = sched.variance(t);
    for (std::size_t i = 0; i < x0.size(); ++i) {
      const double mean = s[i] / n;
      const double var = (s2[i] - n * mean * mean) / (n - 1);
      worst_z = std::max(worst_z, std::abs(mean - m * x0[i]) / std::sqrt(v / n));
      worst_var = std::max(worst_var, std::abs(var / v - 1.0));
    }
  }
  return {worst_z <= 4.0 && worst_var <= 0.05, "max |mean error| " + fmt("%.2f", worst_z) +
                                                   " SE (<= 4), max variance error " +
                                                   fmt("%.2f", 100 * worst_var) + "% (<= 5%)"};
}

Outcome inversion_round_trip() {
  const VpSchedule sched(0.1, 20.0, 100);
  const auto items = make_dataset(1, 64, recipe());
  const EmpiricalScore score(dataset_images(items), sched);
  double worst = 1e9;
  for (int k = 0; k < 8; ++k) {
    const ImageTensor& x = items[9 * k % 64].image;
    const ImageTensor latent = ddim_invert(x, score, sched);
    worst = std::min(worst, psnr(x, ddim_sample(score, sched, latent).final));
  }
  // not part of the criterion: held-out renders on the same model, and a smooth model
  const auto held = make_dataset(77, 8, recipe());
  double held_empirical = 1e9;
  double held_smooth = 1e9;
  ImageTensor mean = ImageTensor::like(items[0].image);
  for (const auto& it : items) mean.add_scaled(it.image, 1.0 / items.size());
  const GaussianScore smooth(mean, 0.05, sched);
  for (const auto& it : held) {
    held_empirical = std::min(held_empirical,
                              psnr(it.image, ddim_sample(score, sched, ddim_invert(it.image, score, sched)).final));
    held_smooth = std::min(held_smooth,
                           psnr(it.image, ddim_sample(smooth, sched, ddim_invert(it.image, smooth, sched)).final));
  }
  info("held-out renders: empirical model min " + fmt("%.1f", held_empirical) + " dB, Gaussian model min " +
       fmt("%.1f", held_smooth) + " dB");
  return {worst > 40.0, "min PSNR " + fmt("%.1f", worst) + " dB over 8 dataset images (> 40)"};
}

Outcome geometry_preservation() {
  const VpSchedule sched(0.1, 20.0, 100);
  const auto items = make_dataset(1, 64, recipe());
  const EmpiricalScore score(dataset_images(items), sched);
  const CcrConfig cfg;
  double ccr_with = 0.0;
  double ccr_without = 0.0;
  double si_with = 0.0;
  double si_without = 0.0;
  for (int seed = 0; seed < 8; ++seed) {
    const DatasetItem& src = items[8 * seed + seed];  // scene `seed` under light `seed`
    const int target_light = static_cast<int>((src.light_index + 4) % 8);
    const LightPrompt prompt = prompt_for_light(target_light, 8, 32, 32);
    GuidanceConfig with;
    GuidanceConfig without;
    without.lambda_r = 0.0;
    const auto a = relight(src.image, prompt, score, sched, with);
    const auto b = relight(src.image, prompt, score, sched, without);
    const auto ref = extract_ccr(src.image, cfg);
    ccr_with += mean_squared_error(extract_ccr(a.run.final, cfg), ref);
    ccr_without += mean_squared_error(extract_ccr(b.run.final, cfg), ref);
    const IlluminationMap target = compose_prompt(prompt, 32, 32);
    si_with += mean_squared_error(extract_illumination(a.run.final, with.retinex), target);
    si_without += mean_squared_error(extract_illumination(b.run.final, without.retinex), target);
  }
  const double ccr_ratio = ccr_with / ccr_without;
  const double si_change = si_with / si_without - 1.0;
  return {ccr_ratio <= 0.7 && si_change < 0.25,
          "CCR MSE ratio " + fmt("%.3f", ccr_ratio) + " (<= 0.7), S_I change " + fmt("%+.1f", 100 * si_change) +
              "% (< 25%)"};
}

Outcome sampler_correctness() {
  const VpSchedule sched(0.1, 20.0, 500);
  const auto items = make_dataset(1, 64, recipe());
  ImageTensor a = ImageTensor::like(items[0].image);
  for (const auto& it : items) a.add_scaled(it.image, 1.0 / items.size());
  const double sigma2 = 0.01;
  const GaussianScore score(a, sigma2, sched);
  const int chains = 256;
  const auto runs = sample_chains(score, nullptr, sched, 7, chains, 1);
  ImageTensor mean = ImageTensor::like(a);
  for (const auto& r : runs) mean.add_scaled(r.final, 1.0 / chains);
  double var = 0.0;
  for (const auto& r : runs) var += squared_norm(r.final - mean);
  var /= static_cast<double>(chains - 1) * a.size();
  const double target = sigma2 + sched.variance(1.0 / sched.steps());
  const double mean_err = relative_l2_error(mean, a);
  const double var_err = std::abs(var / target - 1.0);
  return {mean_err <= 0.05 && var_err <= 0.15, "mean relative error " + fmt("%.2f", 100 * mean_err) +
                                                   "% (<= 5%), variance " + fmt("%.5f", var) + " vs " +
                                                   fmt("%.5f", target) + " (" + fmt("%.1f", 100 * var_err) +
                                                   "%, <= 15%)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "illumdiff_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string prompt = R"("prompt": {"components": [{"alpha": 1, "mu": [16, 6], "sigma": [[60, 0], [0, 60]]}]})";
  std::ofstream(root / "base.json") << R"({"dataset": {"count": 32}, "seeds": [11, 12], "chains": 2,
    "schedule": {"steps": 60}, )" << prompt << "}";
  std::ostringstream sink;
  std::ostringstream errs;
  if (cli::run_cli({"render", "--config", (root / "base.json").string(), "--out", (root / "src").string(),
                    "--reference"},
                   sink, errs) != 0) {
    return {false, "render failed: " + errs.str()};
  }
  std::ofstream(root / "input.json") << R"({"dataset": {"count": 32}, "seeds": [11], "schedule": {"steps": 40},
    "input": "src/image.pfm", )" << prompt << "}";
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"render", "base.json"},        {"dataset", "base.json"},      {"extract-illum", "input.json"},
      {"extract-ccr", "input.json"},  {"generate", "base.json"},     {"relight", "input.json"},
      {"invert", "input.json"},       {"gradcheck", "base.json"},    {"eval", "base.json"},
  };
  int identical = 0;
  std::string failures;
  for (const auto& [cmd, cfg] : runs) {
    std::string manifests[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = root / (cmd + "_" + std::to_string(rep));
      const int code =
          cli::run_cli({cmd, "--config", (root / cfg).string(), "--out", out.string(), "--reference"}, sink, errs);
      manifests[rep] = code == 0 ? slurp(out / "manifest.json") : "";
    }
    if (!manifests[0].empty() && manifests[0] == manifests[1]) {
      ++identical;
    } else {
      failures += " " + cmd;
    }
  }
  fs::remove_all(root);
  return {identical == static_cast<int>(runs.size()),
          std::to_string(identical) + "/" + std::to_string(runs.size()) + " subcommands byte-identical" +
              (failures.empty() ? "" : "; differ:" + failures)};
}

Outcome retinex_consistency() {
  DatasetRecipe r;
  r.base.objects.push_back({Sphere{16.0, 16.0, 20.0}, {0.5, 0.5, 0.5}});
  r.lights = ring_lights(8, 60.0, 0.8, 0.2);
  r.position_jitter = 3.0;
  r.radius_jitter = 2.0;
  const RetinexConfig retinex;  // scales 1, 4, 16
  double worst = 1.0;
  for (std::size_t i = 0; i < 16; ++i) {
    SceneSpec s = jittered_scene(r, 9, i);
    CounterRng rng(9, 1000 + i);
    const Rgb albedo{rng.uniform(0.3, 0.9), rng.uniform(0.3, 0.9), rng.uniform(0.3, 0.9)};
    s.background_albedo = albedo;
    for (auto& o : s.objects) o.albedo = albedo;
    const RenderOutput out = render(s, r.lights[i % r.lights.size()]);
    worst = std::min(worst, pearson(extract_illumination(out.image, retinex), out.shading));
  }
  return {worst > 0.95, "min Pearson r " + fmt("%.4f", worst) + " over 16 renders (> 0.95)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"guidance efficacy", guidance_efficacy},
      {"CCR illumination invariance", ccr_invariance},
      {"gradient correctness", gradient_correctness},
      {"perturbation kernel moments", perturbation_moments},
      {"DDIM inversion round trip", inversion_round_trip},
      {"geometry preservation", geometry_preservation},
      {"sampler correctness", sampler_correctness},
      {"determinism", determinism},
      {"retinex/renderer consistency", retinex_consistency},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu: %s  %s: %s [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
