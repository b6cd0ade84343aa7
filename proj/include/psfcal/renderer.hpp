#pragma once

// Spatially-varying defocus rendering.
//
// Every source pixel (i,j) spreads its intensity over a normalized Gaussian
// kernel whose radius comes from its own depth, r(i,j) = blur_sigma_pixels(...).
// A target pixel collects I(i,j) * G_ij(x-i, y-j) from every source whose
// kernel reaches it and is divided by the collected weight. Sources outside
// the frame are replicate-edge copies of the border (intensity and depth).
// Foreground and background mix linearly; there is no occlusion handling.
//
// Two implementations share this contract:
//   render_focused_reference  literal per-target gather, serial
//   render_focused            exact grouping by blur radius with separable
//                             passes, OpenMP over rows
// They agree to within floating-point reassociation. Results never depend on
// the thread count: each target's accumulation order is fixed.

#include <cstddef>
#include <span>
#include <vector>

#include "psfcal/image.hpp"
#include "psfcal/optics.hpp"
#include "psfcal/psf_kernel.hpp"

namespace psfcal {

struct RenderOptions {
  KernelSizePolicy kernel;
};

struct RenderStats {
  std::size_t clamped_sources = 0;  // in-frame sources whose kernel hit max_size
  std::size_t blur_levels = 0;      // distinct r values (fast path only)
};

[[nodiscard]] Image render_focused_reference(const Scene& scene, const CameraParams& params,
                                             double focus_depth_mm, const RenderOptions& options = {},
                                             RenderStats* stats = nullptr);

[[nodiscard]] Image render_focused(const Scene& scene, const CameraParams& params,
                                   double focus_depth_mm, const RenderOptions& options = {},
                                   RenderStats* stats = nullptr);

// Per-pixel r for the whole frame, row-major.
[[nodiscard]] std::vector<double> blur_radius_map(const DepthMap& depth, const CameraParams& params,
                                                  double focus_depth_mm);

struct StackEntry {
  Image image;
  double measured_mm = 0.0;  // d
};

struct FocalStack {
  std::vector<StackEntry> entries;
  Scene scene;
  double focal_length_mm = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
  void validate() const;
};

// One focused image per measured distance d, in input order, each focused at
// focus_depth(d, params.e_mm, params.focal_length_mm).
[[nodiscard]] FocalStack render_stack(const Scene& scene, const CameraParams& params,
                                      std::span<const double> measured_mm,
                                      const RenderOptions& options = {});

}  // namespace psfcal
