#pragma once

// Helpers shared by the reference and parallel renderers. Not installed.

#include <algorithm>
#include <cstddef>

#include "psfcal/errors.hpp"
#include "psfcal/renderer.hpp"

namespace psfcal::detail {

inline int clamp_index(int v, int n) noexcept { return std::clamp(v, 0, n - 1); }

inline void check_render_inputs(const Scene& scene, const CameraParams& params, double focus_depth_mm,
                                const RenderOptions& options) {
  scene.validate();
  params.validate();
  options.kernel.validate();
  if (!(focus_depth_mm > params.focal_length_mm)) {
    throw DomainError("focus depth must exceed the focal length");
  }
}

inline double clamp_unit(double v) noexcept { return std::clamp(v, 0.0, 1.0); }

}  // namespace psfcal::detail
