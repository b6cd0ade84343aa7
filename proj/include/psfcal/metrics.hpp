#pragma once

// Image comparison losses used by the parameter search:
//   loss1  luminance MSE over all pixels and channels
//   loss2  MSE of the signed 4-neighbour Laplacians (grayscale)
//   loss3  MSE between normalized |Laplacian| histograms (grayscale)
//   loss4  (1 - mean SSIM) / 2, 11x11 Gaussian window, sigma 1.5
// All four are symmetric in their arguments and zero on identical inputs.

#include <vector>

#include "psfcal/image.hpp"

namespace psfcal {

struct LossWeights {
  double lambda1 = 50000.0;
  double lambda2 = 10000.0;
  double lambda3 = 40000.0;
  double lambda4 = 5000.0;

  void validate() const;
};

struct HistogramConfig {
  int bin_count = 64;
  double range_max = 4.0;  // largest possible |Laplacian| for intensities in [0,1]

  void validate() const;
};

struct LossBreakdown {
  double loss1 = 0.0;
  double loss2 = 0.0;
  double loss3 = 0.0;
  double loss4 = 0.0;
  double total = 0.0;
};

// Recomputes total from the four components.
[[nodiscard]] LossBreakdown combine(double loss1, double loss2, double loss3, double loss4,
                                    const LossWeights& weights);

[[nodiscard]] Image to_grayscale(const Image& img);

// 4-neighbour stencil (centre -4, N/S/E/W +1), replicate-edge, on the grayscale image.
[[nodiscard]] Field laplacian_map(const Image& img);

[[nodiscard]] double loss1_luminance(const Image& a, const Image& b);
[[nodiscard]] double loss2_defocus(const Image& a, const Image& b);

// Count-normalized histogram of |Laplacian| over bin_count uniform bins on
// [0, range_max]; values >= range_max land in the last bin.
[[nodiscard]] std::vector<double> sharpness_histogram(const Image& img, const HistogramConfig& cfg = {});
[[nodiscard]] double loss3_histogram(const Image& a, const Image& b, const HistogramConfig& cfg = {});

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

// Mean of the SSIM map over valid window positions, averaged across channels.
[[nodiscard]] double mean_ssim(const Image& a, const Image& b);
[[nodiscard]] double loss4_ssim(const Image& a, const Image& b);

[[nodiscard]] LossBreakdown total_loss(const Image& a, const Image& b, const LossWeights& weights = {},
                                       const HistogramConfig& cfg = {});

}  // namespace psfcal

namespace psfcal {

// Caches the reference-side terms (Laplacian, histogram, SSIM moments) so a
// fixed reference can be compared against many candidates cheaply.
// evaluate(b) returns exactly total_loss(reference, b, ...).
class LossEvaluator {
 public:
  LossEvaluator(const Image& reference, const LossWeights& weights = {}, const HistogramConfig& cfg = {});

  [[nodiscard]] LossBreakdown evaluate(const Image& candidate) const;

 private:
  struct Moments {
    std::vector<double> mean;    // Gaussian-filtered x, per channel, valid region
    std::vector<double> energy;  // Gaussian-filtered x^2
  };

  Image reference_;
  LossWeights weights_;
  HistogramConfig cfg_;
  Field laplacian_;
  std::vector<double> histogram_;
  std::vector<Moments> moments_;  // per channel
};

}  // namespace psfcal
