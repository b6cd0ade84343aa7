#include "psfcal/image.hpp"

#include <cmath>
#include <string>

#include "psfcal/errors.hpp"

namespace psfcal {

namespace {

void require_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw ContractViolation("image dimensions must be >= 1, got " + std::to_string(width) + "x" +
                            std::to_string(height));
  }
}

}  // namespace

Image::Image(int width, int height, int channels, double fill)
    : Image(width, height, channels,
            std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                    static_cast<std::size_t>(std::max(height, 0)) *
                                    static_cast<std::size_t>(std::max(channels, 0)),
                                fill)) {}

Image::Image(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  require_dims(width, height);
  if (channels != 1 && channels != 3) throw ContractViolation("images have 1 or 3 channels");
  if (data_.size() != pixel_count() * static_cast<std::size_t>(channels)) {
    throw ContractViolation("image buffer size does not match " + shape_string());
  }
}

std::string Image::shape_string() const {
  return std::to_string(width_) + "x" + std::to_string(height_) + "x" + std::to_string(channels_);
}

void Image::validate() const {
  for (double v : data_) {
    if (!(v >= 0.0 && v <= 1.0)) throw ContractViolation("image intensity outside [0,1]");
  }
}

DepthMap::DepthMap(int width, int height, float fill)
    : DepthMap(width, height,
               std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) *
                                      static_cast<std::size_t>(std::max(height, 0)),
                                  fill)) {}

DepthMap::DepthMap(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  require_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ContractViolation("depth buffer size does not match dimensions");
  }
}

void DepthMap::validate() const {
  for (float v : data_) {
    if (!(v > 0.0f) || !std::isfinite(v)) throw ContractViolation("depth values must be finite and > 0");
  }
}

void Scene::validate() const {
  if (all_in_focus.width() != depth.width() || all_in_focus.height() != depth.height()) {
    throw ContractViolation("all-in-focus image is " + all_in_focus.shape_string() +
                            " but depth map is " + std::to_string(depth.width()) + "x" +
                            std::to_string(depth.height()));
  }
  all_in_focus.validate();
  depth.validate();
}

}  // namespace psfcal
