#pragma once

#include <optional>
#include <span>
#include <vector>

namespace psfcal {

// Below this radius (pixels) a kernel is the exact delta kernel.
inline constexpr double kDeltaRadius = 1e-3;
inline constexpr double kDefaultDynamicFactor = 4.0;
inline constexpr int kDefaultMaxKernelSize = 129;

// Smallest odd integer >= max(1, ceil(dynamic_factor * r)). Not clamped.
[[nodiscard]] int kernel_size(double r, double dynamic_factor = kDefaultDynamicFactor);

struct KernelSizing {
  int size = 1;
  bool clamped = false;
};

// How the renderers pick a kernel side length for a given r. With
// fixed_size set every non-delta kernel gets that size instead of the
// dynamic rule.
struct KernelSizePolicy {
  double dynamic_factor = kDefaultDynamicFactor;
  int max_size = kDefaultMaxKernelSize;
  std::optional<int> fixed_size;

  void validate() const;
  [[nodiscard]] KernelSizing resolve(double r) const;
};

// Square, odd-sized, normalized PSF kernel. Immutable after construction.
class Kernel {
 public:
  Kernel(int size, std::vector<double> weights);

  [[nodiscard]] int size() const noexcept { return size_; }
  [[nodiscard]] int half() const noexcept { return size_ / 2; }
  [[nodiscard]] double operator()(int row, int col) const { return weights_[row * size_ + col]; }
  [[nodiscard]] double center() const { return (*this)(half(), half()); }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

 private:
  int size_;
  std::vector<double> weights_;
};

// Samples exp(-(x^2+y^2)/(2r^2)) at integer offsets and divides by the sample
// sum. r < kDeltaRadius yields the delta kernel.
[[nodiscard]] Kernel build_kernel(double r, int size);

// 1-D factor of build_kernel: build_kernel(r, k)(i, j) == p[i] * p[j] up to rounding.
[[nodiscard]] std::vector<double> gaussian_profile(double r, int size);

}  // namespace psfcal
