#include "psfcal/psf_kernel.hpp"

#include <cmath>
#include <string>

#include "psfcal/errors.hpp"

namespace psfcal {

namespace {

void require_odd_size(int size) {
  if (size < 1 || size % 2 == 0) {
    throw ContractViolation("kernel size must be odd and >= 1, got " + std::to_string(size));
  }
}

}  // namespace

int kernel_size(double r, double dynamic_factor) {
  if (!(r > 0.0)) return 1;
  const double span = std::ceil(dynamic_factor * r);
  // Saturate rather than overflow for absurd radii; callers clamp anyway.
  const int k = span >= 1 << 29 ? (1 << 29) : std::max(1, static_cast<int>(span));
  return k % 2 == 1 ? k : k + 1;
}

void KernelSizePolicy::validate() const {
  if (!(dynamic_factor > 0.0)) throw ConfigError("dynamic factor must be > 0");
  if (max_size < 1 || max_size % 2 == 0) throw ConfigError("max kernel size must be odd and >= 1");
  if (fixed_size && (*fixed_size < 1 || *fixed_size % 2 == 0)) {
    throw ConfigError("fixed kernel size must be odd and >= 1");
  }
}

KernelSizing KernelSizePolicy::resolve(double r) const {
  if (r < kDeltaRadius) return {1, false};
  const int wanted = fixed_size ? *fixed_size : kernel_size(r, dynamic_factor);
  if (wanted > max_size) return {max_size, true};
  return {wanted, false};
}

Kernel::Kernel(int size, std::vector<double> weights) : size_(size), weights_(std::move(weights)) {
  require_odd_size(size);
  if (weights_.size() != static_cast<std::size_t>(size) * static_cast<std::size_t>(size)) {
    throw ContractViolation("kernel weight count does not match size");
  }
}

Kernel build_kernel(double r, int size) {
  require_odd_size(size);
  if (!(r >= 0.0)) throw ContractViolation("kernel radius must be >= 0");

  const int half = size / 2;
  std::vector<double> w(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0);
  if (r < kDeltaRadius) {
    w[static_cast<std::size_t>(half) * size + half] = 1.0;
    return Kernel(size, std::move(w));
  }

  const double inv_two_r2 = 1.0 / (2.0 * r * r);
  double sum = 0.0;
  for (int dy = -half; dy <= half; ++dy) {
    for (int dx = -half; dx <= half; ++dx) {
      const double v = std::exp(-static_cast<double>(dx * dx + dy * dy) * inv_two_r2);
      w[static_cast<std::size_t>(dy + half) * size + (dx + half)] = v;
      sum += v;
    }
  }
  for (double& v : w) v /= sum;
  return Kernel(size, std::move(w));
}

std::vector<double> gaussian_profile(double r, int size) {
  require_odd_size(size);
  if (!(r >= 0.0)) throw ContractViolation("kernel radius must be >= 0");

  const int half = size / 2;
  std::vector<double> p(static_cast<std::size_t>(size), 0.0);
  if (r < kDeltaRadius) {
    p[half] = 1.0;
    return p;
  }
  const double inv_two_r2 = 1.0 / (2.0 * r * r);
  double sum = 0.0;
  for (int d = -half; d <= half; ++d) {
    p[d + half] = std::exp(-static_cast<double>(d * d) * inv_two_r2);
    sum += p[d + half];
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace psfcal
