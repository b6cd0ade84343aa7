#pragma once

// Two-dimensional exhaustive search for (A, e): the objective is the
// component-wise mean of total_loss over every image of a focal stack, each
// compared with a render of the stack's scene at (A, e).

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "psfcal/metrics.hpp"
#include "psfcal/renderer.hpp"

namespace psfcal {

// min, min+step, ... up to max; max is included when (max-min)/step is an
// integer within 1e-9. Values are min + i*step (no accumulated drift).
[[nodiscard]] std::vector<double> inclusive_range(double min, double max, double step);

struct SearchGrid {
  double A_min = 100.0;
  double A_max = 2000.0;
  double A_step = 20.0;
  double e_min_mm = 20.0;
  double e_max_mm = 28.0;
  double e_step_mm = 0.2;

  void validate() const;
  [[nodiscard]] std::vector<double> A_values() const;
  [[nodiscard]] std::vector<double> e_values() const;
};

struct ObjectiveConfig {
  LossWeights weights;
  HistogramConfig histogram;
  RenderOptions render;
};

struct SurfaceCell {
  double A = 0.0;
  double e_mm = 0.0;
  LossBreakdown loss;  // all +inf when infeasible

  [[nodiscard]] bool feasible() const noexcept;
};

struct SearchResult {
  double A_opt = 0.0;
  double e_opt_mm = 0.0;
  double min_loss = 0.0;
  LossBreakdown at_optimum;
  std::vector<SurfaceCell> surface;  // ordered by (A, e)
  std::size_t A_count = 0;
  std::size_t e_count = 0;
};

// Mean LossBreakdown over the stack. A cell where some entry has d + e <= F
// is infeasible and every component is +inf.
[[nodiscard]] LossBreakdown objective(const FocalStack& stack, double A, double e_mm,
                                      const ObjectiveConfig& config = {});

// Precomputes per-entry reference terms; reuse across many (A, e) cells.
class StackObjective {
 public:
  StackObjective(const FocalStack& stack, const ObjectiveConfig& config = {});

  [[nodiscard]] LossBreakdown operator()(double A, double e_mm) const;

 private:
  const FocalStack* stack_;
  ObjectiveConfig config_;
  std::vector<LossEvaluator> evaluators_;
};

// Evaluates every lattice cell (in parallel) and returns the argmin. Ties go
// to the smallest A, then the smallest e. Throws InfeasibleError when no cell
// is feasible.
[[nodiscard]] SearchResult grid_search(const FocalStack& stack, const SearchGrid& grid,
                                       const ObjectiveConfig& config = {});

// CSV: header "A,e,loss1,loss2,loss3,loss4,total", one row per cell in
// (A, e) order, shortest round-trip decimal numbers, "inf" for infeasible.
void export_surface(const SearchResult& result, std::ostream& out);
void export_surface(const SearchResult& result, const std::filesystem::path& path);

[[nodiscard]] std::vector<SurfaceCell> read_surface(const std::filesystem::path& path);

}  // namespace psfcal
