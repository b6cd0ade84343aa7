#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace psfcal {

// Interleaved H x W x C intensities in [0,1], row-major, C in {1, 3}.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, double fill = 0.0);
  Image(int width, int height, int channels, std::vector<double> data);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] int channels() const noexcept { return channels_; }
  [[nodiscard]] std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] double& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  [[nodiscard]] double at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  [[nodiscard]] std::span<double> data() noexcept { return data_; }
  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

  [[nodiscard]] bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }
  [[nodiscard]] std::string shape_string() const;

  // Throws ContractViolation if any intensity lies outside [0,1] or is NaN.
  void validate() const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  [[nodiscard]] std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// Per-pixel depth in millimetres. Stored as float32, which is what the
// on-disk format holds, so a scene survives a write/read cycle unchanged.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height, float fill = 0.0f);
  DepthMap(int width, int height, std::vector<float> data);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }

  [[nodiscard]] float& at(int x, int y) { return data_[index(x, y)]; }
  [[nodiscard]] float at(int x, int y) const { return data_[index(x, y)]; }

  [[nodiscard]] std::span<float> data() noexcept { return data_; }
  [[nodiscard]] std::span<const float> data() const noexcept { return data_; }

  // Throws ContractViolation unless every depth is finite and > 0.
  void validate() const;

  friend bool operator==(const DepthMap&, const DepthMap&) = default;

 private:
  [[nodiscard]] std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

struct Scene {
  Image all_in_focus;
  DepthMap depth;

  void validate() const;
};

// Signed scalar field (e.g. a Laplacian), not bound to [0,1].
struct Field {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  [[nodiscard]] double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

}  // namespace psfcal
