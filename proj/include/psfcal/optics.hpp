#pragma once

// Thin-lens and circle-of-confusion relations.
//
// Units: every distance is in millimetres, every blur quantity in pixels.
// The mm -> px conversion only happens through the pixel size and output
// scale (coc_diameter_pixels, composite_A).

#include <optional>

namespace psfcal {

struct LensSpec {
  double focal_length_mm = 0.0;
  std::optional<double> f_number;
  std::optional<double> pixel_size_mm;  // mm per pixel
  std::optional<double> output_scale;
  std::optional<double> coc_scale;      // omega, Gaussian r = omega * CoC(px)

  void validate() const;
};

// A is the composite optical parameter a*omega/(rho*s) in pixels, e the
// mechanical offset between measured distance d and lens-to-sensor distance
// v (v = d + e). e may be negative.
struct CameraParams {
  double A = 0.0;
  double e_mm = 0.0;
  double focal_length_mm = 0.0;

  void validate() const;
};

// Lens-to-sensor distance v for an object at focus_depth (1/D + 1/v = 1/F).
[[nodiscard]] double image_distance(double focus_depth_mm, double focal_length_mm);

[[nodiscard]] double coc_diameter_mm(const LensSpec& lens, double depth_mm, double focus_depth_mm);
[[nodiscard]] double coc_diameter_pixels(const LensSpec& lens, double depth_mm, double focus_depth_mm);

[[nodiscard]] double composite_A(const LensSpec& lens);

// Focus depth for a measured distance d and offset e: D_f = F(d+e)/(d+e-F).
[[nodiscard]] double focus_depth(double measured_mm, double offset_mm, double focal_length_mm);

// Gaussian PSF parameter r for a point at depth_mm when focused at focus_depth_mm:
//   r = A * |D - D_f| / D * F / (D_f - F)
[[nodiscard]] double blur_sigma_pixels(const CameraParams& params, double depth_mm,
                                       double focus_depth_mm);

}  // namespace psfcal
