#include <cmath>
#include <vector>

#include "psfcal/renderer.hpp"
#include "render_common.hpp"

namespace psfcal {

std::vector<double> blur_radius_map(const DepthMap& depth, const CameraParams& params,
                                    double focus_depth_mm) {
  std::vector<double> radius(depth.data().size());
  const auto d = depth.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    radius[i] = blur_sigma_pixels(params, static_cast<double>(d[i]), focus_depth_mm);
  }
  return radius;
}

// Straight transcription of the gather sum: for each target, visit every
// source in the widest possible window and keep those whose own kernel
// reaches the target. Weights are recomputed from scratch with exp(); only
// each source's normalization constant is precomputed.
Image render_focused_reference(const Scene& scene, const CameraParams& params, double focus_depth_mm,
                               const RenderOptions& options, RenderStats* stats) {
  detail::check_render_inputs(scene, params, focus_depth_mm, options);

  const Image& src = scene.all_in_focus;
  const int width = src.width();
  const int height = src.height();
  const int channels = src.channels();
  const std::vector<double> radius = blur_radius_map(scene.depth, params, focus_depth_mm);

  std::vector<int> half(radius.size());
  std::vector<double> norm(radius.size());
  int max_half = 0;
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < radius.size(); ++i) {
    const KernelSizing sizing = options.kernel.resolve(radius[i]);
    clamped += sizing.clamped ? 1 : 0;
    half[i] = sizing.size / 2;
    max_half = std::max(max_half, half[i]);
    if (radius[i] < kDeltaRadius) {
      norm[i] = 1.0;
      continue;
    }
    double sum = 0.0;
    for (int dy = -half[i]; dy <= half[i]; ++dy)
      for (int dx = -half[i]; dx <= half[i]; ++dx)
        sum += std::exp(-(dx * dx + dy * dy) / (2.0 * radius[i] * radius[i]));
    norm[i] = sum;
  }

  Image out(width, height, channels);
  std::vector<double> acc(static_cast<std::size_t>(channels));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      std::fill(acc.begin(), acc.end(), 0.0);
      double weight_sum = 0.0;
      for (int sy = y - max_half; sy <= y + max_half; ++sy) {
        for (int sx = x - max_half; sx <= x + max_half; ++sx) {
          const int cx = detail::clamp_index(sx, width);
          const int cy = detail::clamp_index(sy, height);
          const std::size_t s = static_cast<std::size_t>(cy) * width + cx;
          const int dx = x - sx;
          const int dy = y - sy;
          if (std::abs(dx) > half[s] || std::abs(dy) > half[s]) continue;

          double w;
          if (radius[s] < kDeltaRadius) {
            w = (dx == 0 && dy == 0) ? 1.0 : 0.0;
          } else {
            w = std::exp(-(dx * dx + dy * dy) / (2.0 * radius[s] * radius[s])) / norm[s];
          }
          for (int c = 0; c < channels; ++c) acc[c] += w * src.at(cx, cy, c);
          weight_sum += w;
        }
      }
      for (int c = 0; c < channels; ++c) out.at(x, y, c) = detail::clamp_unit(acc[c] / weight_sum);
    }
  }

  if (stats) {
    stats->clamped_sources = clamped;
    stats->blur_levels = 0;
  }
  return out;
}

}  // namespace psfcal
