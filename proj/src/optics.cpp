#include "psfcal/optics.hpp"

#include <cmath>
#include <string>

#include "psfcal/errors.hpp"

namespace psfcal {

namespace {

void require_positive(const std::optional<double>& value, const char* name) {
  if (value && !(*value > 0.0)) throw ConfigError(std::string("lens ") + name + " must be > 0");
}

double require_field(const std::optional<double>& value, const char* name) {
  if (!value) throw ConfigError(std::string("lens ") + name + " is required here");
  return *value;
}

void require_focus_beyond_focal_length(double focus_depth_mm, double focal_length_mm) {
  if (!(focus_depth_mm > focal_length_mm)) {
    throw DomainError("focus depth " + std::to_string(focus_depth_mm) +
                      " mm must exceed the focal length " + std::to_string(focal_length_mm) + " mm");
  }
}

// |D - D_f| / D * F / (D_f - F): the part of the CoC shared by every formula.
double defocus_geometry(double depth_mm, double focus_depth_mm, double focal_length_mm) {
  if (!(depth_mm > 0.0)) throw DomainError("object depth must be > 0 mm");
  require_focus_beyond_focal_length(focus_depth_mm, focal_length_mm);
  return std::abs(depth_mm - focus_depth_mm) / depth_mm * focal_length_mm /
         (focus_depth_mm - focal_length_mm);
}

}  // namespace

void LensSpec::validate() const {
  if (!(focal_length_mm > 0.0)) throw ConfigError("lens focal length must be > 0");
  require_positive(f_number, "f-number");
  require_positive(pixel_size_mm, "pixel size");
  require_positive(output_scale, "output scale");
  // omega may be zero (degenerate but well defined), not negative.
  if (coc_scale && *coc_scale < 0.0) throw ConfigError("lens CoC scale must be >= 0");
}

void CameraParams::validate() const {
  if (!(A > 0.0) || !std::isfinite(A)) throw ConfigError("camera parameter A must be > 0");
  if (!std::isfinite(e_mm)) throw ConfigError("camera offset e must be finite");
  if (!(focal_length_mm > 0.0)) throw ConfigError("focal length must be > 0");
}

double image_distance(double focus_depth_mm, double focal_length_mm) {
  require_focus_beyond_focal_length(focus_depth_mm, focal_length_mm);
  return focal_length_mm * focus_depth_mm / (focus_depth_mm - focal_length_mm);
}

double coc_diameter_mm(const LensSpec& lens, double depth_mm, double focus_depth_mm) {
  lens.validate();
  const double n = require_field(lens.f_number, "f-number");
  const double aperture = lens.focal_length_mm / n;
  return aperture * defocus_geometry(depth_mm, focus_depth_mm, lens.focal_length_mm);
}

double coc_diameter_pixels(const LensSpec& lens, double depth_mm, double focus_depth_mm) {
  lens.validate();
  const double rho = require_field(lens.pixel_size_mm, "pixel size");
  const double s = require_field(lens.output_scale, "output scale");
  return coc_diameter_mm(lens, depth_mm, focus_depth_mm) / (rho * s);
}

double composite_A(const LensSpec& lens) {
  lens.validate();
  const double n = require_field(lens.f_number, "f-number");
  const double rho = require_field(lens.pixel_size_mm, "pixel size");
  const double s = require_field(lens.output_scale, "output scale");
  const double omega = require_field(lens.coc_scale, "CoC scale");
  return lens.focal_length_mm / n * omega / (rho * s);
}

double focus_depth(double measured_mm, double offset_mm, double focal_length_mm) {
  if (!(focal_length_mm > 0.0)) throw ConfigError("focal length must be > 0");
  const double v = measured_mm + offset_mm;
  if (!(v > focal_length_mm)) {
    throw DomainError("d + e = " + std::to_string(v) + " mm must exceed the focal length " +
                      std::to_string(focal_length_mm) + " mm");
  }
  return focal_length_mm * v / (v - focal_length_mm);
}

double blur_sigma_pixels(const CameraParams& params, double depth_mm, double focus_depth_mm) {
  params.validate();
  return params.A * defocus_geometry(depth_mm, focus_depth_mm, params.focal_length_mm);
}

}  // namespace psfcal
