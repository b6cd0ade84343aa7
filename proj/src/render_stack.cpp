#include <cmath>
#include <string>

#include "psfcal/errors.hpp"
#include "psfcal/renderer.hpp"

namespace psfcal {

void FocalStack::validate() const {
  scene.validate();
  if (!(focal_length_mm > 0.0)) throw ContractViolation("focal stack needs a focal length > 0");
  if (entries.empty()) throw ContractViolation("focal stack is empty");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& entry = entries[i];
    if (entry.image.width() != scene.all_in_focus.width() ||
        entry.image.height() != scene.all_in_focus.height()) {
      throw ContractViolation("stack entry " + std::to_string(i) + " is " + entry.image.shape_string() +
                              ", scene is " + scene.all_in_focus.shape_string());
    }
    if (!std::isfinite(entry.measured_mm) || !(entry.measured_mm > 0.0)) {
      throw ContractViolation("stack entry " + std::to_string(i) + " has a non-positive distance");
    }
  }
}

FocalStack render_stack(const Scene& scene, const CameraParams& params, std::span<const double> measured_mm,
                        const RenderOptions& options) {
  scene.validate();
  params.validate();

  std::vector<double> focus(measured_mm.size());
  for (std::size_t i = 0; i < measured_mm.size(); ++i) {
    try {
      focus[i] = focus_depth(measured_mm[i], params.e_mm, params.focal_length_mm);
    } catch (const DomainError& err) {
      throw DomainError("d_list[" + std::to_string(i) + "]: " + err.what());
    }
  }

  FocalStack stack;
  stack.scene = scene;
  stack.focal_length_mm = params.focal_length_mm;
  stack.entries.reserve(measured_mm.size());
  for (std::size_t i = 0; i < measured_mm.size(); ++i) {
    stack.entries.push_back({render_focused(scene, params, focus[i], options), measured_mm[i]});
  }
  return stack;
}

}  // namespace psfcal
