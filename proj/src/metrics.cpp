#include "psfcal/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "psfcal/errors.hpp"

namespace psfcal {

namespace {

void require_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b)) {
    throw ContractViolation("image shapes differ: " + a.shape_string() + " vs " + b.shape_string());
  }
}

constexpr double kSsimC1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
constexpr double kSsimC2 = 0.03 * 0.03;  // (K2 * L)^2

std::array<double, kSsimWindow> ssim_window() {
  std::array<double, kSsimWindow> g{};
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - kSsimWindow / 2;
    g[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Gaussian-weighted window means at every valid window position:
// output is (W-10) x (H-10), row-major.
std::vector<double> window_mean(const std::vector<double>& plane, int width, int height) {
  static const auto g = ssim_window();
  const int out_w = width - kSsimWindow + 1;
  const int out_h = height - kSsimWindow + 1;
  std::vector<double> horizontal(static_cast<std::size_t>(out_w) * height);
  for (int y = 0; y < height; ++y) {
    const double* row = &plane[static_cast<std::size_t>(y) * width];
    for (int x = 0; x < out_w; ++x) {
      double s = 0.0;
      for (int i = 0; i < kSsimWindow; ++i) s += g[i] * row[x + i];
      horizontal[static_cast<std::size_t>(y) * out_w + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(out_w) * out_h, 0.0);
  for (int y = 0; y < out_h; ++y) {
    double* dst = &out[static_cast<std::size_t>(y) * out_w];
    for (int i = 0; i < kSsimWindow; ++i) {
      const double* src = &horizontal[static_cast<std::size_t>(y + i) * out_w];
      for (int x = 0; x < out_w; ++x) dst[x] += g[i] * src[x];
    }
  }
  return out;
}

std::vector<double> channel_plane(const Image& img, int c) {
  std::vector<double> plane(img.pixel_count());
  const auto data = img.data();
  const int channels = img.channels();
  for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = data[i * channels + c];
  return plane;
}

std::vector<double> product_plane(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

void require_ssim_size(const Image& img) {
  if (img.width() < kSsimWindow || img.height() < kSsimWindow) {
    throw ContractViolation("SSIM needs images of at least " + std::to_string(kSsimWindow) + "x" +
                            std::to_string(kSsimWindow) + ", got " + img.shape_string());
  }
}

// Mean SSIM for one channel from the two window means and the second moments.
double ssim_from_moments(const std::vector<double>& mu_a, const std::vector<double>& energy_a,
                         const std::vector<double>& mu_b, const std::vector<double>& energy_b,
                         const std::vector<double>& cross) {
  double sum = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = energy_a[i] - ma * ma;
    const double var_b = energy_b[i] - mb * mb;
    const double cov = cross[i] - ma * mb;
    sum += ((2.0 * ma * mb + kSsimC1) * (2.0 * cov + kSsimC2)) /
           ((ma * ma + mb * mb + kSsimC1) * (var_a + var_b + kSsimC2));
  }
  return sum / static_cast<double>(mu_a.size());
}

double mse(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

double loss4_from_ssim(double ssim) { return std::max(0.0, (1.0 - ssim) / 2.0); }

}  // namespace

void LossWeights::validate() const {
  for (double l : {lambda1, lambda2, lambda3, lambda4}) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("loss weights must be finite and >= 0");
  }
  if (lambda1 == 0.0 && lambda2 == 0.0 && lambda3 == 0.0 && lambda4 == 0.0) {
    throw ConfigError("at least one loss weight must be positive");
  }
}

void HistogramConfig::validate() const {
  if (bin_count < 2) throw ConfigError("histogram needs at least 2 bins");
  if (!(range_max > 0.0) || !std::isfinite(range_max)) throw ConfigError("histogram range must be > 0");
}

LossBreakdown combine(double loss1, double loss2, double loss3, double loss4, const LossWeights& w) {
  return {loss1, loss2, loss3, loss4,
          w.lambda1 * loss1 + w.lambda2 * loss2 + w.lambda3 * loss3 + w.lambda4 * loss4};
}

Image to_grayscale(const Image& img) {
  if (img.channels() == 1) return img;
  Image out(img.width(), img.height(), 1);
  const auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (src[3 * i] + src[3 * i + 1] + src[3 * i + 2]) / 3.0;
  return out;
}

Field laplacian_map(const Image& img) {
  const Image gray = to_grayscale(img);
  const int w = gray.width();
  const int h = gray.height();
  const auto g = gray.data();
  Field out{w, h, std::vector<double>(g.size())};
  for (int y = 0; y < h; ++y) {
    const std::size_t up = static_cast<std::size_t>(std::max(y - 1, 0)) * w;
    const std::size_t mid = static_cast<std::size_t>(y) * w;
    const std::size_t down = static_cast<std::size_t>(std::min(y + 1, h - 1)) * w;
    for (int x = 0; x < w; ++x) {
      const int left = std::max(x - 1, 0);
      const int right = std::min(x + 1, w - 1);
      out.values[mid + x] = g[up + x] + g[down + x] + g[mid + left] + g[mid + right] - 4.0 * g[mid + x];
    }
  }
  return out;
}

double loss1_luminance(const Image& a, const Image& b) {
  require_same_shape(a, b);
  double sum = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = da[i] - db[i];
    sum += d * d;
  }
  return sum / static_cast<double>(da.size());
}

double loss2_defocus(const Image& a, const Image& b) {
  require_same_shape(a, b);
  return mse(laplacian_map(a).values, laplacian_map(b).values);
}

namespace {

std::vector<double> histogram_of(const Field& laplacian, const HistogramConfig& cfg) {
  std::vector<double> counts(static_cast<std::size_t>(cfg.bin_count), 0.0);
  const double scale = cfg.bin_count / cfg.range_max;
  for (double v : laplacian.values) {
    const double pos = std::abs(v) * scale;
    const int bin = pos >= cfg.bin_count ? cfg.bin_count - 1 : static_cast<int>(pos);
    counts[static_cast<std::size_t>(bin)] += 1.0;
  }
  const double n = static_cast<double>(laplacian.values.size());
  for (double& c : counts) c /= n;
  return counts;
}

}  // namespace

std::vector<double> sharpness_histogram(const Image& img, const HistogramConfig& cfg) {
  cfg.validate();
  return histogram_of(laplacian_map(img), cfg);
}

double loss3_histogram(const Image& a, const Image& b, const HistogramConfig& cfg) {
  require_same_shape(a, b);
  return mse(sharpness_histogram(a, cfg), sharpness_histogram(b, cfg));
}

double mean_ssim(const Image& a, const Image& b) {
  require_same_shape(a, b);
  require_ssim_size(a);
  const int w = a.width();
  const int h = a.height();
  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    const auto pa = channel_plane(a, c);
    const auto pb = channel_plane(b, c);
    total += ssim_from_moments(window_mean(pa, w, h), window_mean(product_plane(pa, pa), w, h),
                               window_mean(pb, w, h), window_mean(product_plane(pb, pb), w, h),
                               window_mean(product_plane(pa, pb), w, h));
  }
  return total / a.channels();
}

double loss4_ssim(const Image& a, const Image& b) { return loss4_from_ssim(mean_ssim(a, b)); }

LossBreakdown total_loss(const Image& a, const Image& b, const LossWeights& weights, const HistogramConfig& cfg) {
  return LossEvaluator(a, weights, cfg).evaluate(b);
}

LossEvaluator::LossEvaluator(const Image& reference, const LossWeights& weights, const HistogramConfig& cfg)
    : reference_(reference), weights_(weights), cfg_(cfg) {
  weights_.validate();
  cfg_.validate();
  require_ssim_size(reference_);
  laplacian_ = laplacian_map(reference_);
  histogram_ = histogram_of(laplacian_, cfg_);
  const int w = reference_.width();
  const int h = reference_.height();
  for (int c = 0; c < reference_.channels(); ++c) {
    const auto plane = channel_plane(reference_, c);
    moments_.push_back({window_mean(plane, w, h), window_mean(product_plane(plane, plane), w, h)});
  }
}

LossBreakdown LossEvaluator::evaluate(const Image& candidate) const {
  require_same_shape(reference_, candidate);
  const double l1 = loss1_luminance(reference_, candidate);
  const Field lap = laplacian_map(candidate);
  const double l2 = mse(laplacian_.values, lap.values);
  const double l3 = mse(histogram_, histogram_of(lap, cfg_));

  const int w = candidate.width();
  const int h = candidate.height();
  double ssim = 0.0;
  for (int c = 0; c < candidate.channels(); ++c) {
    const auto ref_plane = channel_plane(reference_, c);
    const auto plane = channel_plane(candidate, c);
    ssim += ssim_from_moments(moments_[c].mean, moments_[c].energy, window_mean(plane, w, h),
                              window_mean(product_plane(plane, plane), w, h),
                              window_mean(product_plane(ref_plane, plane), w, h));
  }
  ssim /= candidate.channels();
  return combine(l1, l2, l3, loss4_from_ssim(ssim), weights_);
}

}  // namespace psfcal
