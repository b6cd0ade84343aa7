#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "psfcal/renderer.hpp"
#include "render_common.hpp"

namespace psfcal {

namespace {

// Every source pixel sharing one exact r value. Coordinates are in the padded
// frame: a border pixel also stands for its replicate copies up to `half`
// pixels outside the image.
struct BlurLevel {
  double r = 0.0;
  int half = 0;
  bool clamped = false;
  std::vector<double> profile;  // 1-D normalized Gaussian, size 2*half+1
  std::vector<int> pixels;      // in-frame pixel indices, row-major
};

struct PaddedSource {
  int sx;
  int sy;
};

std::vector<PaddedSource> expand_sources(const BlurLevel& level, int width, int height) {
  std::vector<PaddedSource> sources;
  sources.reserve(level.pixels.size());
  const int h = level.half;
  for (int p : level.pixels) {
    const int x = p % width;
    const int y = p / width;
    const int x_lo = x == 0 ? -h : x;
    const int x_hi = x == width - 1 ? width - 1 + h : x;
    const int y_lo = y == 0 ? -h : y;
    const int y_hi = y == height - 1 ? height - 1 + h : y;
    for (int sy = y_lo; sy <= y_hi; ++sy)
      for (int sx = x_lo; sx <= x_hi; ++sx) sources.push_back({sx, sy});
  }
  std::sort(sources.begin(), sources.end(), [](const PaddedSource& a, const PaddedSource& b) {
    return a.sy != b.sy ? a.sy < b.sy : a.sx < b.sx;
  });
  return sources;
}

struct Box {
  int x0, x1, y0, y1;  // inclusive
};

Box bounding_box(const std::vector<PaddedSource>& sources) {
  Box box{sources.front().sx, sources.front().sx, sources.front().sy, sources.back().sy};
  for (const auto& s : sources) {
    box.x0 = std::min(box.x0, s.sx);
    box.x1 = std::max(box.x1, s.sx);
  }
  return box;
}

// Accumulators: `stride` = channels + 1 doubles per pixel, the last one the
// weight sum.
struct Accumulator {
  int width;
  int height;
  int stride;
  std::vector<double> values;

  double* row(int y) { return values.data() + static_cast<std::size_t>(y) * width * stride; }
};

// Scatter each source's separable kernel, organised as a gather over target
// rows so that rows can be split between threads. Per target, contributions
// arrive ordered by source row, then source column.
void accumulate_direct(const BlurLevel& level, const std::vector<PaddedSource>& sources, const Box& box,
                       const Image& src, Accumulator& acc) {
  const int width = src.width();
  const int height = src.height();
  const int channels = src.channels();
  const int h = level.half;
  const double* p = level.profile.data();

  // First source index of each padded row in [box.y0, box.y1 + 1].
  std::vector<std::size_t> row_start(static_cast<std::size_t>(box.y1 - box.y0 + 2), sources.size());
  for (std::size_t i = sources.size(); i-- > 0;) row_start[sources[i].sy - box.y0] = i;
  for (std::size_t r = row_start.size() - 1; r-- > 0;) row_start[r] = std::min(row_start[r], row_start[r + 1]);

  const int ty0 = std::max(0, box.y0 - h);
  const int ty1 = std::min(height - 1, box.y1 + h);

#pragma omp parallel for schedule(static)
  for (int y = ty0; y <= ty1; ++y) {
    double* out = acc.row(y);
    const int sy_lo = std::max(box.y0, y - h);
    const int sy_hi = std::min(box.y1, y + h);
    for (int sy = sy_lo; sy <= sy_hi; ++sy) {
      const double wy = p[y - sy + h];
      const int cy = detail::clamp_index(sy, height);
      for (std::size_t i = row_start[sy - box.y0]; i < row_start[sy - box.y0 + 1]; ++i) {
        const int sx = sources[i].sx;
        const int cx = detail::clamp_index(sx, width);
        const double* value = &src.data()[(static_cast<std::size_t>(cy) * width + cx) * channels];
        const int x_lo = std::max(0, sx - h);
        const int x_hi = std::min(width - 1, sx + h);
        for (int x = x_lo; x <= x_hi; ++x) {
          const double w = wy * p[x - sx + h];
          double* cell = out + static_cast<std::size_t>(x) * acc.stride;
          for (int c = 0; c < channels; ++c) cell[c] += w * value[c];
          cell[channels] += w;
        }
      }
    }
  }
}

enum class PassOrder { horizontal_first, vertical_first };

// Two 1-D passes over the level's bounding box. Members are copied into a
// dense masked box (non-members zero), filtered along one axis into scratch,
// then along the other into the accumulator. Each output row is owned by one
// thread and summed in a fixed order.
void accumulate_separable(const BlurLevel& level, const std::vector<PaddedSource>& sources,
                          const Box& box, const Image& src, Accumulator& acc, PassOrder order) {
  const int width = src.width();
  const int height = src.height();
  const int channels = src.channels();
  const int stride = channels + 1;
  const int h = level.half;
  const int k = 2 * h + 1;
  const double* p = level.profile.data();

  const int box_w = box.x1 - box.x0 + 1;
  const int box_h = box.y1 - box.y0 + 1;
  const int tx0 = std::max(0, box.x0 - h);
  const int tx1 = std::min(width - 1, box.x1 + h);
  const int ty0 = std::max(0, box.y0 - h);
  const int ty1 = std::min(height - 1, box.y1 + h);
  const int span_w = tx1 - tx0 + 1;
  const std::size_t box_row = static_cast<std::size_t>(box_w) * stride;

  std::vector<double> masked(static_cast<std::size_t>(box_h) * box_row, 0.0);
  for (const auto& s : sources) {
    const int cx = detail::clamp_index(s.sx, width);
    const int cy = detail::clamp_index(s.sy, height);
    const double* value = &src.data()[(static_cast<std::size_t>(cy) * width + cx) * channels];
    double* m = &masked[static_cast<std::size_t>(s.sy - box.y0) * box_row + static_cast<std::size_t>(s.sx - box.x0) * stride];
    for (int c = 0; c < channels; ++c) m[c] = value[c];
    m[channels] = 1.0;
  }

  // Adds the horizontal filtering of one box-wide row into a target row
  // (indexed from tx0). Target x receives source columns in increasing order.
  auto scatter_row = [&](const double* in, double* dst) {
    for (int i = 0; i < box_w; ++i) {
      const double* v = in + static_cast<std::size_t>(i) * stride;
      if (v[channels] == 0.0) continue;
      const int sx = box.x0 + i;
      const int j_lo = std::max(0, h - sx);                    // x = sx - h + j >= 0
      const int j_hi = std::min(k - 1, width - 1 - sx + h);    // x <= width - 1
      for (int j = j_lo; j <= j_hi; ++j) {
        const double w = p[j];
        double* cell = dst + static_cast<std::size_t>(sx - h + j - tx0) * stride;
        for (int c = 0; c < stride; ++c) cell[c] += w * v[c];
      }
    }
  };

  if (order == PassOrder::horizontal_first) {
    const std::size_t span_row = static_cast<std::size_t>(span_w) * stride;
    std::vector<double> scratch(static_cast<std::size_t>(box_h) * span_row, 0.0);
#pragma omp parallel for schedule(static)
    for (int row = 0; row < box_h; ++row) scatter_row(&masked[row * box_row], &scratch[row * span_row]);

#pragma omp parallel for schedule(static)
    for (int y = ty0; y <= ty1; ++y) {
      double* dst = acc.row(y) + static_cast<std::size_t>(tx0) * stride;
      const int row_lo = std::max(0, y - h - box.y0);
      const int row_hi = std::min(box_h - 1, y + h - box.y0);
      for (int row = row_lo; row <= row_hi; ++row) {
        const double w = p[y - (box.y0 + row) + h];
        const double* in = &scratch[row * span_row];
        for (std::size_t i = 0; i < span_row; ++i) dst[i] += w * in[i];
      }
    }
  } else {
#pragma omp parallel
    {
      std::vector<double> column_pass(box_row);
#pragma omp for schedule(static)
      for (int y = ty0; y <= ty1; ++y) {
        std::fill(column_pass.begin(), column_pass.end(), 0.0);
        const int row_lo = std::max(0, y - h - box.y0);
        const int row_hi = std::min(box_h - 1, y + h - box.y0);
        for (int row = row_lo; row <= row_hi; ++row) {
          const double w = p[y - (box.y0 + row) + h];
          const double* in = &masked[row * box_row];
          for (std::size_t i = 0; i < box_row; ++i) column_pass[i] += w * in[i];
        }
        scatter_row(column_pass.data(), acc.row(y) + static_cast<std::size_t>(tx0) * stride);
      }
    }
  }
}

}  // namespace

Image render_focused(const Scene& scene, const CameraParams& params, double focus_depth_mm,
                     const RenderOptions& options, RenderStats* stats) {
  detail::check_render_inputs(scene, params, focus_depth_mm, options);

  const Image& src = scene.all_in_focus;
  const int width = src.width();
  const int height = src.height();
  const int channels = src.channels();
  const std::vector<double> radius = blur_radius_map(scene.depth, params, focus_depth_mm);

  // Group by exact r; std::map keeps levels in ascending r, which fixes the
  // order in which levels are accumulated.
  std::map<double, BlurLevel> by_radius;
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < radius.size(); ++i) {
    auto [it, inserted] = by_radius.try_emplace(radius[i]);
    BlurLevel& level = it->second;
    if (inserted) {
      const KernelSizing sizing = options.kernel.resolve(radius[i]);
      level.r = radius[i];
      level.half = sizing.size / 2;
      level.clamped = sizing.clamped;
      level.profile = gaussian_profile(radius[i], sizing.size);
    }
    if (level.clamped) ++clamped;
    level.pixels.push_back(static_cast<int>(i));
  }

  Accumulator acc{width, height, channels + 1,
                  std::vector<double>(src.pixel_count() * static_cast<std::size_t>(channels + 1), 0.0)};

  for (const auto& [r, level] : by_radius) {
    const std::vector<PaddedSource> sources = expand_sources(level, width, height);
    const Box box = bounding_box(sources);
    const double k = 2.0 * level.half + 1.0;
    const double box_w = box.x1 - box.x0 + 1.0;
    const double box_h = box.y1 - box.y0 + 1.0;
    const double span_w = std::min<double>(width, box_w + 2.0 * level.half);
    const double span_h = std::min<double>(height, box_h + 2.0 * level.half);
    const double direct_cost = static_cast<double>(sources.size()) * k * k;
    const double horizontal_first = k * (box_h * box_w + span_h * span_w) + box_h * box_w;
    const double vertical_first = k * 2.0 * span_h * box_w + box_h * box_w;
    if (level.half == 0 || direct_cost <= std::min(horizontal_first, vertical_first)) {
      accumulate_direct(level, sources, box, src, acc);
    } else if (horizontal_first <= vertical_first) {
      accumulate_separable(level, sources, box, src, acc, PassOrder::horizontal_first);
    } else {
      accumulate_separable(level, sources, box, src, acc, PassOrder::vertical_first);
    }
  }

  Image out(width, height, channels);
  auto data = out.data();
  const std::size_t n = src.pixel_count();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    const double* cell = &acc.values[i * (channels + 1)];
    for (int c = 0; c < channels; ++c) data[i * channels + c] = detail::clamp_unit(cell[c] / cell[channels]);
  }

  if (stats) {
    stats->clamped_sources = clamped;
    stats->blur_levels = by_radius.size();
  }
  return out;
}

}  // namespace psfcal
