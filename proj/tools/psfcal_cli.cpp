// psfcal: synthesize planted focal stacks, render defocus, estimate (A, e).
//
// Results go to stdout as key=value lines; diagnostics go to stderr.
// Exit codes: 0 success, 1 runtime / I-O / infeasible, 2 usage.

#include <omp.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "psfcal/dataset.hpp"
#include "psfcal/errors.hpp"
#include "psfcal/estimator.hpp"
#include "psfcal/image_io.hpp"
#include "psfcal/metrics.hpp"
#include "psfcal/renderer.hpp"

namespace fs = std::filesystem;
using namespace psfcal;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Bad flag values discovered after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

struct Range {
  double min = 0, max = 0, step = 0;
};

Range parse_range(const std::string& text, const char* flag) {
  Range r;
  double* fields[] = {&r.min, &r.max, &r.step};
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t colon = text.find(':', start);
    if ((i < 2) == (colon == std::string::npos)) {
      throw UsageError(std::string(flag) + " expects min:max:step, got '" + text + "'");
    }
    const std::string_view part = std::string_view(text).substr(start, colon - start);
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), *fields[i]);
    if (ec != std::errc{} || end != part.data() + part.size()) {
      throw UsageError(std::string(flag) + ": bad number '" + std::string(part) + "'");
    }
    start = colon + 1;
  }
  return r;
}

LossWeights parse_weights(const std::vector<double>& values) {
  if (values.empty()) return {};
  if (values.size() != 4) throw UsageError("--weights expects four comma-separated values");
  LossWeights w{values[0], values[1], values[2], values[3]};
  try {
    w.validate();
  } catch (const ConfigError& err) {
    throw UsageError(std::string("--weights: ") + err.what());
  }
  return w;
}

struct KernelFlags {
  double dynamic_factor = kDefaultDynamicFactor;
  int max_size = kDefaultMaxKernelSize;
  std::optional<int> fixed_size;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--dynamic-factor", dynamic_factor, "Kernel side = factor * r (rounded up to odd)");
    cmd->add_option("--max-kernel", max_size, "Upper bound on kernel side length (odd)");
    cmd->add_option("--fixed-kernel", fixed_size, "Use one fixed odd kernel size instead of the dynamic rule");
  }

  RenderOptions options() const {
    RenderOptions opts;
    opts.kernel.dynamic_factor = dynamic_factor;
    opts.kernel.max_size = max_size;
    opts.kernel.fixed_size = fixed_size;
    try {
      opts.kernel.validate();
    } catch (const ConfigError& err) {
      throw UsageError(err.what());
    }
    return opts;
  }
};

struct SynthFlags {
  fs::path out;
  int width = 0, height = 0, patch = 8;
  std::string depth;
  double A = 0, e = 0, focal_length = 0;
  std::vector<double> d_list;
  std::uint64_t seed = 0;
  double noise = 0.0;
  int mask = 0;
  KernelFlags kernel;
};

int run_synth(const SynthFlags& f) {
  MaskSpec mask;
  mask.width = f.width;
  mask.height = f.height;
  mask.patch_size = f.patch;
  mask.seed = f.seed;
  if (f.mask != 0) mask.colors = mask_palette(f.mask);
  DepthSceneSpec depth;
  try {
    depth = parse_depth_spec(f.depth);
    mask.validate();
  } catch (const ConfigError& err) {
    throw UsageError(err.what());
  }
  if (f.noise < 0.0) throw UsageError("--noise must be >= 0");
  const CameraParams params{f.A, f.e, f.focal_length};
  try {
    params.validate();
  } catch (const ConfigError& err) {
    throw UsageError(err.what());
  }
  const fs::path manifest =
      make_planted_dataset(f.out, mask, depth, params, f.d_list, NoiseSpec{f.noise, f.seed}, f.kernel.options());
  std::cout << "manifest=" << manifest.string() << '\n';
  return 0;
}

struct RenderFlags {
  fs::path scene, out;
  double A = 0, e = 0, d = 0;
  bool oracle = false;
  KernelFlags kernel;
};

int run_render(const RenderFlags& f) {
  const LoadedDataset data = read_scene(f.scene);
  const CameraParams params{f.A, f.e, data.stack.focal_length_mm};
  const double df = focus_depth(f.d, f.e, data.stack.focal_length_mm);
  const RenderOptions options = f.kernel.options();

  RenderStats stats;
  Image rendered = f.oracle ? render_focused_reference(data.stack.scene, params, df, options, &stats)
                            : render_focused(data.stack.scene, params, df, options, &stats);
  if (stats.clamped_sources > 0) {
    std::cerr << "warning: " << stats.clamped_sources << " pixels needed kernels larger than "
              << options.kernel.max_size << " and were clamped\n";
  }
  std::cout << "focus_depth_mm=" << num(df) << '\n';
  if (f.oracle) {
    const Image fast = render_focused(data.stack.scene, params, df, options);
    double diff = 0.0;
    for (std::size_t i = 0; i < fast.data().size(); ++i) {
      diff = std::max(diff, std::abs(fast.data()[i] - rendered.data()[i]));
    }
    std::cout << "max_abs_diff_vs_fast=" << num(diff) << '\n';
  }
  write_png(rendered, f.out);
  std::cout << "out=" << f.out.string() << '\n';
  return 0;
}

struct EstimateFlags {
  fs::path dataset;
  std::string A_range, e_range;
  std::vector<double> weights;
  int bins = 64;
  std::optional<fs::path> surface;
  KernelFlags kernel;
};

int run_estimate(const EstimateFlags& f) {
  const Range a = parse_range(f.A_range, "--A-range");
  const Range e = parse_range(f.e_range, "--e-range");
  SearchGrid grid{a.min, a.max, a.step, e.min, e.max, e.step};
  ObjectiveConfig config;
  config.weights = parse_weights(f.weights);
  config.histogram.bin_count = f.bins;
  config.render = f.kernel.options();
  try {
    grid.validate();
    config.histogram.validate();
  } catch (const ConfigError& err) {
    throw UsageError(err.what());
  }

  const LoadedDataset data = read_scene(f.dataset);
  const SearchResult result = grid_search(data.stack, grid, config);
  if (f.surface) export_surface(result, *f.surface);

  std::cout << "A_opt=" << num(result.A_opt) << '\n'
            << "e_opt=" << num(result.e_opt_mm) << '\n'
            << "min_loss=" << num(result.min_loss) << '\n'
            << "loss1=" << num(result.at_optimum.loss1) << '\n'
            << "loss2=" << num(result.at_optimum.loss2) << '\n'
            << "loss3=" << num(result.at_optimum.loss3) << '\n'
            << "loss4=" << num(result.at_optimum.loss4) << '\n'
            << "cells=" << result.surface.size() << '\n';
  if (data.manifest.planted) {
    std::cout << "planted_A=" << num(data.manifest.planted->A) << '\n'
              << "planted_e=" << num(data.manifest.planted->e_mm) << '\n';
  }
  if (f.surface) std::cout << "surface=" << f.surface->string() << '\n';
  return 0;
}

struct LossFlags {
  fs::path ref, test;
  std::vector<double> weights;
  int bins = 64;
};

int run_loss(const LossFlags& f) {
  HistogramConfig cfg;
  cfg.bin_count = f.bins;
  const LossWeights weights = parse_weights(f.weights);
  try {
    cfg.validate();
  } catch (const ConfigError& err) {
    throw UsageError(err.what());
  }
  const Image ref = read_png(f.ref);
  const Image test = read_png(f.test);
  if (!ref.same_shape(test)) {
    throw UsageError("image shapes differ: " + f.ref.string() + " is " + ref.shape_string() + ", " +
                     f.test.string() + " is " + test.shape_string());
  }
  const LossBreakdown loss = total_loss(ref, test, weights, cfg);
  std::cout << "loss1=" << num(loss.loss1) << '\n'
            << "loss2=" << num(loss.loss2) << '\n'
            << "loss3=" << num(loss.loss3) << '\n'
            << "loss4=" << num(loss.loss4) << '\n'
            << "total=" << num(loss.total) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thin-lens defocus simulation and PSF parameter estimation"};
  app.require_subcommand(1);
  std::optional<int> threads;
  app.add_option("--threads", threads, "Cap on worker threads (results do not change)")->check(CLI::PositiveNumber);

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a planted synthetic dataset");
  synth_cmd->add_option("--out", synth.out, "Dataset directory")->required();
  synth_cmd->add_option("--width", synth.width)->required()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--height", synth.height)->required()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--patch", synth.patch, "Mask patch size in pixels")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--depth", synth.depth, "plane:D | slant:NEAR,FAR | steps:B-E=D,...")->required();
  synth_cmd->add_option("--A", synth.A, "Planted composite optical parameter (px)")->required();
  synth_cmd->add_option("--e", synth.e, "Planted mechanical offset (mm)")->required();
  synth_cmd->add_option("--focal-length", synth.focal_length, "Focal length (mm)")->required();
  synth_cmd->add_option("--d-list", synth.d_list, "Measured distances d (mm)")->required()->delimiter(',');
  synth_cmd->add_option("--seed", synth.seed, "Seed for the mask and the noise");
  synth_cmd->add_option("--noise", synth.noise, "Gaussian pixel noise sigma on stack images");
  synth_cmd->add_option("--mask", synth.mask, "Use mask palette 1..5 instead of mask 1 + white")->check(CLI::Range(1, 5));
  synth.kernel.add_to(synth_cmd);

  RenderFlags render;
  auto* render_cmd = app.add_subcommand("render", "Render one focused image of a dataset's scene");
  render_cmd->add_option("--scene", render.scene, "Dataset directory")->required();
  render_cmd->add_option("--A", render.A)->required();
  render_cmd->add_option("--e", render.e)->required();
  render_cmd->add_option("--d", render.d, "Measured distance (mm)")->required();
  render_cmd->add_option("--out", render.out, "Output PNG")->required();
  render_cmd->add_flag("--oracle", render.oracle, "Use the serial reference renderer");
  render.kernel.add_to(render_cmd);

  EstimateFlags estimate;
  auto* estimate_cmd = app.add_subcommand("estimate", "Grid-search (A, e) on a dataset");
  estimate_cmd->add_option("--dataset", estimate.dataset)->required();
  estimate_cmd->add_option("--A-range", estimate.A_range, "min:max:step")->required();
  estimate_cmd->add_option("--e-range", estimate.e_range, "min:max:step (mm)")->required();
  estimate_cmd->add_option("--weights", estimate.weights, "l1,l2,l3,l4")->delimiter(',');
  estimate_cmd->add_option("--bins", estimate.bins, "Sharpness histogram bins");
  estimate_cmd->add_option("--surface", estimate.surface, "Write the loss surface CSV here");
  estimate.kernel.add_to(estimate_cmd);

  LossFlags loss;
  auto* loss_cmd = app.add_subcommand("loss", "Compare two images");
  loss_cmd->add_option("--ref", loss.ref)->required();
  loss_cmd->add_option("--test", loss.test)->required();
  loss_cmd->add_option("--weights", loss.weights, "l1,l2,l3,l4")->delimiter(',');
  loss_cmd->add_option("--bins", loss.bins, "Sharpness histogram bins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (threads) omp_set_num_threads(*threads);

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*render_cmd) return run_render(render);
    if (*estimate_cmd) return run_estimate(estimate);
    if (*loss_cmd) return run_loss(loss);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
