#include "psfcal/estimator.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

#include "psfcal/errors.hpp"

namespace psfcal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LossBreakdown infeasible_loss() { return {kInf, kInf, kInf, kInf, kInf}; }

void require_range(double min, double max, double step, const char* name) {
  if (!std::isfinite(min) || !std::isfinite(max) || !std::isfinite(step)) {
    throw ConfigError(std::string(name) + " range must be finite");
  }
  if (!(step > 0.0)) throw ConfigError(std::string(name) + " step must be > 0");
  if (!(max >= min)) throw ConfigError(std::string(name) + " max must be >= min");
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_number(std::string_view text, const std::string& where) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw IoError(where + ": cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::vector<double> inclusive_range(double min, double max, double step) {
  require_range(min, max, step, "search");
  const double steps = (max - min) / step;
  const double rounded = std::round(steps);
  const bool hits_max = std::abs(steps - rounded) <= 1e-9;
  const auto count = static_cast<std::size_t>(hits_max ? rounded : std::floor(steps)) + 1;
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = min + static_cast<double>(i) * step;
  if (hits_max) values.back() = max;
  return values;
}

void SearchGrid::validate() const {
  require_range(A_min, A_max, A_step, "A");
  if (!(A_min > 0.0)) throw ConfigError("A range must start above 0");
  require_range(e_min_mm, e_max_mm, e_step_mm, "e");
}

std::vector<double> SearchGrid::A_values() const {
  validate();
  return inclusive_range(A_min, A_max, A_step);
}

std::vector<double> SearchGrid::e_values() const {
  validate();
  return inclusive_range(e_min_mm, e_max_mm, e_step_mm);
}

bool SurfaceCell::feasible() const noexcept { return std::isfinite(loss.total); }

StackObjective::StackObjective(const FocalStack& stack, const ObjectiveConfig& config)
    : stack_(&stack), config_(config) {
  stack.validate();
  config_.weights.validate();
  config_.histogram.validate();
  config_.render.kernel.validate();
  evaluators_.reserve(stack.entries.size());
  for (const auto& entry : stack.entries) {
    evaluators_.emplace_back(entry.image, config_.weights, config_.histogram);
  }
}

LossBreakdown StackObjective::operator()(double A, double e_mm) const {
  const FocalStack& stack = *stack_;
  const CameraParams params{A, e_mm, stack.focal_length_mm};
  params.validate();

  std::vector<double> focus(stack.entries.size());
  for (std::size_t i = 0; i < focus.size(); ++i) {
    const double v = stack.entries[i].measured_mm + e_mm;
    if (!(v > stack.focal_length_mm)) return infeasible_loss();
    focus[i] = focus_depth(stack.entries[i].measured_mm, e_mm, stack.focal_length_mm);
  }

  double l1 = 0.0, l2 = 0.0, l3 = 0.0, l4 = 0.0;
  for (std::size_t i = 0; i < focus.size(); ++i) {
    const Image rendered = render_focused(stack.scene, params, focus[i], config_.render);
    const LossBreakdown loss = evaluators_[i].evaluate(rendered);
    l1 += loss.loss1;
    l2 += loss.loss2;
    l3 += loss.loss3;
    l4 += loss.loss4;
  }
  const double m = static_cast<double>(focus.size());
  return combine(l1 / m, l2 / m, l3 / m, l4 / m, config_.weights);
}

LossBreakdown objective(const FocalStack& stack, double A, double e_mm, const ObjectiveConfig& config) {
  return StackObjective(stack, config)(A, e_mm);
}

SearchResult grid_search(const FocalStack& stack, const SearchGrid& grid, const ObjectiveConfig& config) {
  grid.validate();
  const std::vector<double> as = grid.A_values();
  const std::vector<double> es = grid.e_values();
  const StackObjective evaluate(stack, config);

  SearchResult result;
  result.A_count = as.size();
  result.e_count = es.size();
  result.surface.resize(as.size() * es.size());
  const auto cells = static_cast<std::ptrdiff_t>(result.surface.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < cells; ++i) {
    const auto a = static_cast<std::size_t>(i) / es.size();
    const auto e = static_cast<std::size_t>(i) % es.size();
    result.surface[static_cast<std::size_t>(i)] = {as[a], es[e], evaluate(as[a], es[e])};
  }

  // Serial scan in (A, e) order; strict < keeps the smallest A, then e.
  const SurfaceCell* best = nullptr;
  for (const auto& cell : result.surface) {
    if (!cell.feasible()) continue;
    if (!best || cell.loss.total < best->loss.total) best = &cell;
  }
  if (!best) throw InfeasibleError("no feasible cell: every (A, e) has some d + e <= F");

  result.A_opt = best->A;
  result.e_opt_mm = best->e_mm;
  result.min_loss = best->loss.total;
  result.at_optimum = best->loss;
  return result;
}

void export_surface(const SearchResult& result, std::ostream& out) {
  out << "A,e,loss1,loss2,loss3,loss4,total\n";
  for (const auto& cell : result.surface) {
    out << format_number(cell.A) << ',' << format_number(cell.e_mm) << ',' << format_number(cell.loss.loss1)
        << ',' << format_number(cell.loss.loss2) << ',' << format_number(cell.loss.loss3) << ','
        << format_number(cell.loss.loss4) << ',' << format_number(cell.loss.total) << '\n';
  }
}

void export_surface(const SearchResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open surface file for writing: " + path.string());
  export_surface(result, out);
  out.flush();
  if (!out) throw IoError("failed writing surface file: " + path.string());
}

std::vector<SurfaceCell> read_surface(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open surface file: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "A,e,loss1,loss2,loss3,loss4,total") {
    throw IoError(path.string() + ": missing or unexpected header");
  }
  std::vector<SurfaceCell> cells;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    std::array<double, 7> v{};
    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (field >= v.size()) throw IoError(where + ": too many fields");
      v[field++] = parse_number(std::string_view(line).substr(start, comma - start), where);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (field != v.size()) throw IoError(where + ": expected 7 fields");
    cells.push_back({v[0], v[1], {v[2], v[3], v[4], v[5], v[6]}});
  }
  return cells;
}

}  // namespace psfcal
