#pragma once

// Synthetic scenes with planted ground truth, and the on-disk dataset layout:
//
//   DIR/manifest.json   {"focal_length_mm", "aif", "depth",
//                        "entries": [{"file", "d_mm"}, ...],
//                        "planted": {"A", "e_mm"}}   (planted is optional)
//   DIR/aif.png         all-in-focus image
//   DIR/depth.pfm       depth in millimetres
//   DIR/stack/000.png   focused images, in manifest order

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "psfcal/image.hpp"
#include "psfcal/optics.hpp"
#include "psfcal/renderer.hpp"

namespace psfcal {

using Rgb8 = std::array<std::uint8_t, 3>;

// Colour sets of the five printed calibration masks (mask 1..5), five hues
// each. Throws ConfigError for other indices.
[[nodiscard]] std::vector<Rgb8> mask_palette(int mask_index);

// Mask 1's hues plus white.
[[nodiscard]] std::vector<Rgb8> default_mask_colors();

struct MaskSpec {
  int width = 128;
  int height = 128;
  int patch_size = 8;
  std::vector<Rgb8> colors = default_mask_colors();
  std::uint64_t seed = 0;

  void validate() const;
};

// Tiles the frame with patch_size squares (partial patches at the right and
// bottom edges), each a colour drawn uniformly from spec.colors.
[[nodiscard]] Image synth_mask(const MaskSpec& spec);

struct PlaneDepth {
  double depth_mm = 1000.0;
};
struct SlantDepth {
  double near_mm = 0.0;  // column 0
  double far_mm = 0.0;   // last column
};
struct DepthStep {
  int col_begin = 0;  // inclusive
  int col_end = 0;    // inclusive
  double depth_mm = 0.0;
};
struct StepsDepth {
  std::vector<DepthStep> steps;
};

using DepthSceneSpec = std::variant<PlaneDepth, SlantDepth, StepsDepth>;

// "plane:1000", "slant:900,1600", "steps:0-63=1000,64-127=1400".
[[nodiscard]] DepthSceneSpec parse_depth_spec(std::string_view text);

[[nodiscard]] DepthMap synth_depth(const DepthSceneSpec& spec, int width, int height);

// Additive N(0, sigma^2) per pixel and channel, clamped to [0,1].
[[nodiscard]] Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed);

struct PlantedTruth {
  double A = 0.0;
  double e_mm = 0.0;
};

struct ManifestEntry {
  std::string file;
  double d_mm = 0.0;
};

struct Manifest {
  double focal_length_mm = 0.0;
  std::string aif = "aif.png";
  std::string depth = "depth.pfm";
  std::vector<ManifestEntry> entries;
  std::optional<PlantedTruth> planted;
};

[[nodiscard]] Manifest parse_manifest(std::string_view json_text);
[[nodiscard]] std::string format_manifest(const Manifest& manifest);

struct LoadedDataset {
  Manifest manifest;
  FocalStack stack;  // stack.scene holds the all-in-focus image and depth
};

// Writes DIR (created if needed) and returns the manifest path.
std::filesystem::path write_scene(const std::filesystem::path& dir, const FocalStack& stack,
                                  const std::optional<PlantedTruth>& planted = std::nullopt);

// Throws IoError naming the offending file or manifest field.
[[nodiscard]] LoadedDataset read_scene(const std::filesystem::path& dir);

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// synth_mask + synth_depth + render_stack (+ optional noise on stack images) + write_scene.
std::filesystem::path make_planted_dataset(const std::filesystem::path& dir, const MaskSpec& mask,
                                           const DepthSceneSpec& depth, const CameraParams& params,
                                           const std::vector<double>& measured_mm,
                                           const NoiseSpec& noise = {},
                                           const RenderOptions& options = {});

}  // namespace psfcal
