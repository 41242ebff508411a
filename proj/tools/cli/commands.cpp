// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cli/config.hpp"
#include "cli/manifest.hpp"
#include "illumdiff/ccr.hpp"
#include "illumdiff/ddim.hpp"
#include "illumdiff/error.hpp"
#include "illumdiff/image_io.hpp"
#include "illumdiff/pipeline.hpp"
#include "illumdiff/presets.hpp"
#include "illumdiff/rng.hpp"
#include "illumdiff/sampler.hpp"
#include "illumdiff/score.hpp"

#ifndef ILLUMDIFF_VERSION
#define ILLUMDIFF_VERSION "0.0.0"
#endif

namespace illumdiff::cli {

namespace {

namespace fs = std::filesystem;

struct Context {
  std::string command;
  RunConfig cfg;
  std::optional<fs::path> out_dir;
  int threads = 1;
  bool reference = false;
  std::ostream& out;
  std::ostream& err;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Collects written files so the manifest can list their digests.
class Outputs {
 public:
  explicit Outputs(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  const fs::path& root() const noexcept { return root_; }

  void bytes(const std::string& rel, const std::vector<std::uint8_t>& data) {
    const fs::path p = root_ / rel;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_file(p, data);
    files_.push_back({rel, sha256_hex(data)});
  }

  void text(const std::string& rel, const std::string& s) { bytes(rel, std::vector<std::uint8_t>(s.begin(), s.end())); }
  void image(const std::string& rel, const ImageTensor& img) {
    bytes(rel, rel.ends_with(".ppm") ? encode_ppm(img) : encode_pfm(img));
  }
  void json_doc(const std::string& rel, const json& j) { text(rel, j.dump(2) + "\n"); }

  std::vector<ManifestOutput> take() { return std::move(files_); }

 private:
  fs::path root_;
  std::vector<ManifestOutput> files_;
};

fs::path require_out(const Context& ctx) {
  if (ctx.out_dir) return *ctx.out_dir;
  if (ctx.cfg.output_dir) return *ctx.cfg.output_dir;
  throw ConfigError("$.output_dir", "no output directory (set output_dir or pass --out)");
}

std::optional<fs::path> optional_out(const Context& ctx) {
  if (ctx.out_dir) return ctx.out_dir;
  return ctx.cfg.output_dir;
}

void finish(const Context& ctx, Outputs& outputs, std::chrono::steady_clock::time_point start) {
  RunManifest m;
  m.version = ILLUMDIFF_VERSION;
  m.command = ctx.command;
  m.seeds = ctx.cfg.seeds;
  m.config_hash = config_hash(ctx.cfg.source, ctx.cfg.seeds);
  m.reference = ctx.reference;
  m.threads = ctx.threads;
  m.outputs = outputs.take();
  if (!ctx.reference) {
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  const std::string doc = m.to_json().dump(2) + "\n";
  write_file(outputs.root() / "manifest.json", std::vector<std::uint8_t>(doc.begin(), doc.end()));
  ctx.out << "wrote " << (outputs.root() / "manifest.json").string() << "\n";
}

const fs::path& require_input(const Context& ctx) {
  if (!ctx.cfg.input) throw ConfigError("$.input", "this command needs an input image");
  return *ctx.cfg.input;
}

ImageTensor load_color_input(const Context& ctx) {
  ImageTensor img = load_image(require_input(ctx));
  if (img.channels() != 3) throw ConfigError("$.input", "expected a 3-channel image");
  return img;
}

std::vector<ImageTensor> load_dataset_dir(const fs::path& dir) {
  const auto bytes = read_file(dir / "dataset.json");
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw FormatError(std::string("dataset.json: ") + e.what(), 0);
  }
  if (!doc.contains("items") || !doc.at("items").is_array() || doc.at("items").empty()) {
    throw FormatError("dataset.json: no items", 0);
  }
  std::vector<ImageTensor> images;
  for (const auto& item : doc.at("items")) {
    if (!item.contains("file") || !item.at("file").is_string()) throw FormatError("dataset.json: item without file", 0);
    images.push_back(load_image(dir / item.at("file").get<std::string>()));
  }
  return images;
}

std::unique_ptr<ScoreProvider> make_provider(const RunConfig& cfg, const VpSchedule& schedule) {
  const ProviderSpec& p = cfg.provider;
  if (p.kind == ProviderSpec::Kind::analytic) {
    ImageTensor mean = p.mean_image ? load_image(*p.mean_image) : ImageTensor(cfg.scene.height, cfg.scene.width, 3, p.mean);
    return std::make_unique<GaussianScore>(std::move(mean), p.variance, schedule);
  }
  std::vector<ImageTensor> data;
  if (p.dataset) {
    data = load_dataset_dir(*p.dataset);
  } else {
    data = dataset_images(make_dataset(p.dataset_seed, static_cast<std::size_t>(cfg.dataset_count), cfg.dataset));
  }
  return std::make_unique<EmpiricalScore>(std::move(data), schedule, p.bandwidth);
}

VpSchedule schedule_for(const RunConfig& cfg, int default_steps) {
  return cfg.schedule_given ? cfg.schedule : cfg.schedule.with_steps(default_steps);
}

LightPrompt prompt_or_left(const RunConfig& cfg, int height, int width) {
  return cfg.prompt ? *cfg.prompt : side_prompt(std::numbers::pi, height, width);
}

bool lambda_r_explicit(const RunConfig& cfg) {
  return cfg.source.contains("guidance") && cfg.source.at("guidance").contains("lambda_r");
}

// Guidance toward `prompt` for unconditional generation. The geometry term needs a reference
// image, so it is only active when $.input is given.
GuidanceConfig generation_guidance(const RunConfig& cfg, const LightPrompt& prompt, const Shape& shape) {
  GuidanceConfig g = make_guidance(cfg);
  g.target_illum = compose_prompt(prompt, shape.height, shape.width);
  if (cfg.input) {
    ImageTensor ref = load_image(*cfg.input);
    if (!(ref.shape() == shape)) throw ConfigError("$.input", "shape " + ref.shape().str() + " does not match " + shape.str());
    g.target_ccr = extract_ccr(ref, cfg.ccr);
  } else if (g.lambda_r > 0.0) {
    if (lambda_r_explicit(cfg)) throw ConfigError("$.guidance.lambda_r", "geometry term needs $.input as reference");
    g.lambda_r = 0.0;
  }
  return g;
}

std::string trace_csv(const std::vector<StepRecord>& trace) {
  std::string s = "step,t,E,E_I,E_R\n";
  for (const auto& r : trace) {
    s += std::to_string(r.step) + "," + fmt17(r.t) + "," + fmt17(r.energy.total) + "," +
         fmt17(r.energy.illum_term) + "," + fmt17(r.energy.geom_term) + "\n";
  }
  return s;
}

double illum_mse(const ImageTensor& img, const GuidanceConfig& g) {
  return mean_squared_error(extract_illumination(img, g.retinex), g.target_illum);
}

// ---------------------------------------------------------------------------

int cmd_render(const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  Outputs o(require_out(ctx));
  const RenderOutput r = render(ctx.cfg.scene, ctx.cfg.light);
  o.image("image.pfm", r.image);
  o.image("image.ppm", r.image);
  o.image("reflectance.pfm", r.reflectance);
  o.image("shading.pfm", r.shading);
  o.image("normals.pfm", r.normals);
  o.json_doc("render.json", {{"scene", to_json(ctx.cfg.scene)}, {"light", to_json(ctx.cfg.light)},
                             {"seed", ctx.cfg.seeds.front()}});
  finish(ctx, o, start);
  return exit_ok;
}

int cmd_dataset(const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  Outputs o(require_out(ctx));
  const std::uint64_t seed = ctx.cfg.seeds.front();
  const auto items = make_dataset(seed, static_cast<std::size_t>(ctx.cfg.dataset_count), ctx.cfg.dataset);
  json lights = json::array();
  for (const auto& l : ctx.cfg.dataset.lights) lights.push_back(to_json(l));
  json list = json::array();
  for (std::size_t i = 0; i < items.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "images/%04zu.pfm", i);
    o.image(name, items[i].image);
    list.push_back({{"file", name},
                    {"light_index", items[i].light_index},
                    {"scene_index", items[i].scene_index},
                    {"scene", to_json(items[i].scene)}});
  }
  o.json_doc("dataset.json", {{"seed", seed}, {"count", items.size()}, {"lights", lights}, {"items", list}});
  ctx.out << "dataset: " << items.size() << " images over " << ctx.cfg.dataset.lights.size() << " lights\n";
  finish(ctx, o, start);
  return exit_ok;
}

int cmd_extract_illum(const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const ImageTensor img = load_color_input(ctx);
  Outputs o(require_out(ctx));
  const IlluminationMap map = extract_illumination(img, ctx.cfg.retinex);
  o.image("illumination.pfm", map);
  if (ctx.cfg.prompt) {
    const IlluminationMap target = compose_prompt(*ctx.cfg.prompt, img.height(), img.width());
    o.image("prompt.pfm", target);
    ctx.out << "S_I " << fmt6(mean_squared_error(map, target)) << "\n";
  }
  finish(ctx, o, start);
  return exit_ok;
}

int cmd_extract_ccr(const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const ImageTensor img = load_color_input(ctx);
  Outputs o(require_out(ctx));
  o.image("ccr.pfm", extract_ccr(img, ctx.cfg.ccr));
  finish(ctx, o, start);
  return exit_ok;
}

int cmd_generate(const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const VpSchedule schedule = schedule_for(ctx.cfg, 200);
  const auto score = make_provider(ctx.cfg, schedule);
  const Shape shape = score->shape();
  std::optional<GuidanceConfig> guide;
  if (ctx.cfg.prompt) guide = generation_guidance(ctx.cfg, *ctx.cfg.prompt, shape);
  Outputs o(require_out(ctx));
  for (const std::uint64_t seed : ctx.cfg.seeds) {
    const auto runs = sample_chains(*score, guide ? &*guide : nullptr, schedule, seed, ctx.cfg.chains, ctx.threads);
    for (const auto& run : runs) {
      const std::string stem = "s" + std::to_string(seed) + "_c" + std::to_string(run.chain);
      o.image("samples/" + stem + ".pfm", run.final);
      o.image("samples/" + stem + ".ppm", run.final);
      if (guide && guide->active()) {
        o.text("traces/" + stem + ".csv", trace_csv(run.energy_trace));
        ctx.out << stem << " S_I " << fmt6(illum_mse(run.final, *guide));
        if (run.clipped_steps > 0) ctx.out << " (gradient clipped on " << run.clipped_steps << " steps)";
        ctx.out << "\n";
      }
    }
  }
  finish(ctx, o, start);
  return exit_ok;
}

int cmd_relight(const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  if (!ctx.cfg.prompt) throw ConfigError("$.prompt", "relight needs a light prompt");
  const ImageTensor x0 = load_color_input(ctx);
  const VpSchedule schedule = schedule_for(ctx.cfg, 100);
  const auto score = make_provider(ctx.cfg, schedule);
  if (!(score->shape() == x0.shape())) {
    throw ConfigError("$.input", "shape " + x0.shape().str() + " does not match the model " + score->shape().str());
  }
  const RelightResult r =
      relight(x0, *ctx.cfg.prompt, *score, schedule, make_guidance(ctx.cfg), ctx.cfg.refine_iterations);
  Outputs o(require_out(ctx));
  o.image("relit.pfm", r.run.final);
  o.image("relit.ppm", r.run.final);
  o.image("latent.pfm", r.latent);
  o.text("trace.csv", trace_csv(r.run.energy_trace));
  const IlluminationMap target = compose_prompt(*ctx.cfg.prompt, x0.height(), x0.width());
  ctx.out << "S_I " << fmt6(mean_squared_error(extract_illumination(r.run.final, ctx.cfg.retinex), target))
          << " ccr_mse " << fmt6(mean_squared_error(extract_ccr(r.run.final, ctx.cfg.ccr), extract_ccr(x0, ctx.cfg.ccr)))
          << "\n";
  finish(ctx, o, start);
  return exit_ok;
}

int cmd_invert(const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const ImageTensor x0 = load_color_input(ctx);
  const VpSchedule schedule = schedule_for(ctx.cfg, 100);
  const auto score = make_provider(ctx.cfg, schedule);
  if (!(score->shape() == x0.shape())) {
    throw ConfigError("$.input", "shape " + x0.shape().str() + " does not match the model " + score->shape().str());
  }
  const ImageTensor latent = ddim_invert(x0, *score, schedule, ctx.cfg.refine_iterations);
  const SamplerRun back = ddim_sample(*score, schedule, latent);
  Outputs o(require_out(ctx));
  o.image("latent.pfm", latent);
  o.image("reconstruction.pfm", back.final);
  o.image("reconstruction.ppm", back.final);
  ctx.out << "psnr_db " << fmt6(psnr(x0, back.final)) << "\n";
  finish(ctx, o, start);
  return exit_ok;
}

int cmd_gradcheck(const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const GradcheckParams& p = ctx.cfg.gradcheck;
  const Shape shape{p.size, p.size, 3};
  GuidanceConfig g = make_guidance(ctx.cfg);
  g.target_illum = compose_prompt(prompt_or_left(ctx.cfg, p.size, p.size), p.size, p.size);
  const std::uint64_t seed = ctx.cfg.seeds.front();
  std::vector<double> errors;
  std::string csv = "image,rel_error\n";
  for (int i = 0; i < p.images; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    const ImageTensor x = rng.uniform_image(shape, 0.1, 0.9);
    g.target_ccr = extract_ccr(rng.uniform_image(shape, 0.1, 0.9), g.ccr);
    const double e = relative_l2_error(grad_energy(x, g), fd_gradient(x, g, p.h));
    errors.push_back(e);
    csv += std::to_string(i) + "," + fmt17(e) + "\n";
  }
  double max_e = 0.0;
  double sum = 0.0;
  for (double e : errors) {
    max_e = std::max(max_e, e);
    sum += e;
  }
  const double mean_e = sum / static_cast<double>(errors.size());
  ctx.out << "max_rel_error " << fmt6(max_e) << "\nmean_rel_error " << fmt6(mean_e) << "\n";
  if (const auto dir = optional_out(ctx)) {
    Outputs o(*dir);
    o.text("gradcheck.csv", csv);
    finish(ctx, o, start);
  }
  if (!(max_e <= p.threshold)) {
    ctx.err << "gradient check failed: " << fmt6(max_e) << " > " << fmt6(p.threshold) << "\n";
    return exit_numeric;
  }
  return exit_ok;
}

int cmd_eval(const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const VpSchedule schedule = schedule_for(ctx.cfg, 200);
  const auto score = make_provider(ctx.cfg, schedule);
  const Shape shape = score->shape();
  const GuidanceConfig g = generation_guidance(ctx.cfg, prompt_or_left(ctx.cfg, shape.height, shape.width), shape);
  std::string csv = "seed,guided,unguided\n";
  std::ostringstream table;
  char line[96];
  std::snprintf(line, sizeof line, "%-10s %14s %14s\n", "seed", "guided", "unguided");
  table << line;
  double sum_g = 0.0;
  double sum_u = 0.0;
  for (const std::uint64_t seed : ctx.cfg.seeds) {
    const double sg = illum_mse(reverse_sample_guided(*score, &g, schedule, seed).final, g);
    const double su = illum_mse(reverse_sample_guided(*score, nullptr, schedule, seed).final, g);
    sum_g += sg;
    sum_u += su;
    std::snprintf(line, sizeof line, "%-10llu %14.6g %14.6g\n", static_cast<unsigned long long>(seed), sg, su);
    table << line;
    csv += std::to_string(seed) + "," + fmt17(sg) + "," + fmt17(su) + "\n";
  }
  const double n = static_cast<double>(ctx.cfg.seeds.size());
  std::snprintf(line, sizeof line, "%-10s %14.6g %14.6g\n", "mean", sum_g / n, sum_u / n);
  table << line;
  csv += "mean," + fmt17(sum_g / n) + "," + fmt17(sum_u / n) + "\n";
  ctx.out << table.str();
  if (const auto dir = optional_out(ctx)) {
    Outputs o(*dir);
    o.text("eval.csv", csv);
    finish(ctx, o, start);
  }
  return exit_ok;
}

const std::map<std::string, std::pair<std::string, std::function<int(const Context&)>>>& commands() {
  static const std::map<std::string, std::pair<std::string, std::function<int(const Context&)>>> table = {
      {"render", {"Render a scene to PFM maps and a PPM preview", cmd_render}},
      {"dataset", {"Render a jittered multi-light dataset", cmd_dataset}},
      {"extract-illum", {"Write the multi-scale illumination map of $.input", cmd_extract_illum}},
      {"extract-ccr", {"Write the log cross-color ratios of $.input", cmd_extract_ccr}},
      {"generate", {"Sample images, guided toward $.prompt when given", cmd_generate}},
      {"relight", {"Invert $.input and resample it under $.prompt", cmd_relight}},
      {"invert", {"DDIM-invert $.input and reconstruct it", cmd_invert}},
      {"gradcheck", {"Compare the energy gradient with finite differences", cmd_gradcheck}},
      {"eval", {"Paired guided/unguided illumination error per seed", cmd_eval}},
  };
  return table;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"illumdiff: physics-guided diffusion sampling and relighting", "illumdiff"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ILLUMDIFF_VERSION);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool reference = false;
  for (const auto& [name, entry] : commands()) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "Single seed (overrides seeds)");
    sub->add_option("--threads", threads, "Worker threads for parallel chains")->check(CLI::Range(1, 256));
    sub->add_flag("--reference", reference, "Single-threaded deterministic mode; manifest omits timing");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg = config_path.empty() ? parse_run_config(json::object()) : load_run_config(config_path);
    if (seed) cfg.seeds = {*seed};
    Context ctx{name, std::move(cfg), std::nullopt, reference ? 1 : threads, reference, out, err};
    if (!out_dir.empty()) ctx.out_dir = fs::path(out_dir);
    return commands().at(name).second(ctx);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const ShapeError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericError& e) {
    err << "numeric failure at step " << e.step() << ": " << e.what() << "\n";
    return exit_numeric;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return exit_io;
  } catch (const FormatError& e) {
    err << "io error: " << e.what() << "\n";
    return exit_io;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return exit_io;
  }
}

}  // namespace illumdiff::cli
