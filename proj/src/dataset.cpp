#include "psfcal/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "psfcal/errors.hpp"
#include "psfcal/image_io.hpp"

namespace psfcal {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<Rgb8> mask_palette(int mask_index) {
  // Five hues per mask, taken evenly around the hue circle.
  switch (mask_index) {
    case 1: return {{255, 255, 0}, {255, 80, 80}, {255, 0, 255}, {54, 97, 143}, {51, 204, 204}};
    case 2: return {{184, 124, 76}, {126, 0, 0}, {153, 51, 255}, {217, 243, 255}, {51, 204, 51}};
    case 3: return {{226, 182, 89}, {255, 229, 222}, {204, 102, 255}, {132, 174, 225}, {22, 73, 117}};
    case 4: return {{255, 219, 118}, {255, 117, 194}, {255, 93, 29}, {0, 177, 249}, {134, 117, 131}};
    case 5: return {{255, 247, 208}, {255, 179, 170}, {255, 112, 148}, {0, 106, 247}, {0, 255, 80}};
    default: throw ConfigError("mask index must be 1..5, got " + std::to_string(mask_index));
  }
}

std::vector<Rgb8> default_mask_colors() {
  auto colors = mask_palette(1);
  colors.push_back({255, 255, 255});
  return colors;
}

void MaskSpec::validate() const {
  if (width < 1 || height < 1) throw ConfigError("mask dimensions must be >= 1");
  if (patch_size < 1) throw ConfigError("mask patch size must be >= 1");
  if (colors.empty()) throw ConfigError("mask needs at least one colour");
}

Image synth_mask(const MaskSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick(0, spec.colors.size() - 1);

  Image img(spec.width, spec.height, 3);
  for (int py = 0; py < spec.height; py += spec.patch_size) {
    for (int px = 0; px < spec.width; px += spec.patch_size) {
      const Rgb8& color = spec.colors[pick(rng)];
      for (int y = py; y < std::min(py + spec.patch_size, spec.height); ++y)
        for (int x = px; x < std::min(px + spec.patch_size, spec.width); ++x)
          for (int c = 0; c < 3; ++c) img.at(x, y, c) = color[c] / 255.0;
    }
  }
  return img;
}

namespace {

double parse_double(std::string_view text, std::string_view context) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ConfigError("bad number '" + std::string(text) + "' in " + std::string(context));
  }
  return v;
}

int parse_int(std::string_view text, std::string_view context) {
  int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ConfigError("bad integer '" + std::string(text) + "' in " + std::string(context));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

}  // namespace

DepthSceneSpec parse_depth_spec(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("depth spec needs 'kind:params', got '" + std::string(text) + "'");
  const std::string_view kind = text.substr(0, colon);
  const std::string_view args = text.substr(colon + 1);

  if (kind == "plane") return PlaneDepth{parse_double(args, "plane depth")};
  if (kind == "slant") {
    const auto parts = split(args, ',');
    if (parts.size() != 2) throw ConfigError("slant needs 'near,far'");
    return SlantDepth{parse_double(parts[0], "slant near"), parse_double(parts[1], "slant far")};
  }
  if (kind == "steps") {
    StepsDepth steps;
    for (const auto part : split(args, ',')) {
      const std::size_t eq = part.find('=');
      const std::size_t dash = part.find('-');
      if (eq == std::string_view::npos || dash == std::string_view::npos || dash > eq) {
        throw ConfigError("steps entries look like 'begin-end=depth', got '" + std::string(part) + "'");
      }
      steps.steps.push_back({parse_int(part.substr(0, dash), "steps column"),
                             parse_int(part.substr(dash + 1, eq - dash - 1), "steps column"),
                             parse_double(part.substr(eq + 1), "steps depth")});
    }
    return steps;
  }
  throw ConfigError("unknown depth scene kind '" + std::string(kind) + "' (plane, slant, steps)");
}

DepthMap synth_depth(const DepthSceneSpec& spec, int width, int height) {
  if (width < 1 || height < 1) throw ContractViolation("depth map dimensions must be >= 1");
  std::vector<double> column(static_cast<std::size_t>(width));

  if (const auto* plane = std::get_if<PlaneDepth>(&spec)) {
    std::fill(column.begin(), column.end(), plane->depth_mm);
  } else if (const auto* slant = std::get_if<SlantDepth>(&spec)) {
    for (int x = 0; x < width; ++x) {
      const double t = width == 1 ? 0.0 : static_cast<double>(x) / (width - 1);
      column[x] = slant->near_mm + (slant->far_mm - slant->near_mm) * t;
    }
  } else {
    auto steps = std::get<StepsDepth>(spec).steps;
    std::sort(steps.begin(), steps.end(), [](const DepthStep& a, const DepthStep& b) { return a.col_begin < b.col_begin; });
    int next = 0;
    for (const auto& step : steps) {
      if (step.col_begin != next || step.col_end < step.col_begin) {
        throw ContractViolation("depth steps must partition columns 0.." + std::to_string(width - 1));
      }
      for (int x = step.col_begin; x <= step.col_end && x < width; ++x) column[x] = step.depth_mm;
      next = step.col_end + 1;
    }
    if (next != width) throw ContractViolation("depth steps must partition columns 0.." + std::to_string(width - 1));
  }

  for (double d : column) {
    if (!(d > 0.0) || !std::isfinite(d)) throw ContractViolation("synthetic depths must be > 0");
  }
  DepthMap depth(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) depth.at(x, y) = static_cast<float>(column[x]);
  return depth;
}

Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  Image out = img;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : out.data()) v = std::clamp(v + noise(rng), 0.0, 1.0);
  return out;
}

Manifest parse_manifest(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw IoError(std::string("manifest is not valid JSON: ") + err.what());
  }
  auto field = [&](const json& obj, const char* name, const std::string& where) -> const json& {
    if (!obj.is_object() || !obj.contains(name)) throw IoError("manifest: missing field '" + where + name + "'");
    return obj.at(name);
  };
  auto number = [&](const json& obj, const char* name, const std::string& where) {
    const json& v = field(obj, name, where);
    if (!v.is_number()) throw IoError("manifest: field '" + where + name + "' must be a number");
    return v.get<double>();
  };
  auto string = [&](const json& obj, const char* name, const std::string& where) {
    const json& v = field(obj, name, where);
    if (!v.is_string()) throw IoError("manifest: field '" + where + name + "' must be a string");
    return v.get<std::string>();
  };

  Manifest m;
  m.focal_length_mm = number(doc, "focal_length_mm", "");
  m.aif = string(doc, "aif", "");
  m.depth = string(doc, "depth", "");
  const json& entries = field(doc, "entries", "");
  if (!entries.is_array()) throw IoError("manifest: field 'entries' must be an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "entries[" + std::to_string(i) + "].";
    m.entries.push_back({string(entries[i], "file", where), number(entries[i], "d_mm", where)});
  }
  if (doc.contains("planted") && !doc.at("planted").is_null()) {
    const json& planted = doc.at("planted");
    m.planted = PlantedTruth{number(planted, "A", "planted."), number(planted, "e_mm", "planted.")};
  }
  if (!(m.focal_length_mm > 0.0)) throw IoError("manifest: field 'focal_length_mm' must be > 0");
  if (m.entries.empty()) throw IoError("manifest: field 'entries' must list at least one image");
  return m;
}

std::string format_manifest(const Manifest& m) {
  json doc;
  doc["focal_length_mm"] = m.focal_length_mm;
  doc["aif"] = m.aif;
  doc["depth"] = m.depth;
  doc["entries"] = json::array();
  for (const auto& e : m.entries) doc["entries"].push_back({{"file", e.file}, {"d_mm", e.d_mm}});
  if (m.planted) doc["planted"] = {{"A", m.planted->A}, {"e_mm", m.planted->e_mm}};
  return doc.dump(2) + "\n";
}

fs::path write_scene(const fs::path& dir, const FocalStack& stack, const std::optional<PlantedTruth>& planted) {
  stack.validate();
  std::error_code ec;
  fs::create_directories(dir / "stack", ec);
  if (ec) throw IoError("cannot create dataset directory " + (dir / "stack").string() + ": " + ec.message());

  Manifest m;
  m.focal_length_mm = stack.focal_length_mm;
  m.planted = planted;
  write_png(stack.scene.all_in_focus, dir / m.aif);
  write_pfm(stack.scene.depth, dir / m.depth);

  const int digits = std::max<int>(3, static_cast<int>(std::to_string(stack.entries.size() - 1).size()));
  for (std::size_t i = 0; i < stack.entries.size(); ++i) {
    std::string name = std::to_string(i);
    name.insert(0, static_cast<std::size_t>(digits) - name.size(), '0');
    const std::string file = "stack/" + name + ".png";
    write_png(stack.entries[i].image, dir / file);
    m.entries.push_back({file, stack.entries[i].measured_mm});
  }

  const fs::path manifest_path = dir / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + manifest_path.string());
  out << format_manifest(m);
  if (!out) throw IoError("failed writing " + manifest_path.string());
  return manifest_path;
}

LoadedDataset read_scene(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + manifest_path.string());
  std::stringstream text;
  text << in.rdbuf();

  LoadedDataset out;
  try {
    out.manifest = parse_manifest(text.str());
  } catch (const IoError& err) {
    throw IoError(manifest_path.string() + ": " + err.what());
  }
  const Manifest& m = out.manifest;

  auto require_file = [&](const std::string& name, const std::string& field) {
    const fs::path p = dir / name;
    if (!fs::is_regular_file(p)) throw IoError("dataset file '" + name + "' (manifest field " + field + ") not found in " + dir.string());
    return p;
  };

  out.stack.focal_length_mm = m.focal_length_mm;
  out.stack.scene.all_in_focus = read_png(require_file(m.aif, "aif"));
  out.stack.scene.depth = read_pfm(require_file(m.depth, "depth"));
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    const std::string field = "entries[" + std::to_string(i) + "].file";
    out.stack.entries.push_back({read_png(require_file(m.entries[i].file, field)), m.entries[i].d_mm});
  }
  try {
    out.stack.validate();
  } catch (const ContractViolation& err) {
    throw IoError(dir.string() + ": inconsistent dataset: " + err.what());
  }
  return out;
}

fs::path make_planted_dataset(const fs::path& dir, const MaskSpec& mask, const DepthSceneSpec& depth,
                              const CameraParams& params, const std::vector<double>& measured_mm,
                              const NoiseSpec& noise, const RenderOptions& options) {
  if (measured_mm.empty()) throw ConfigError("planted dataset needs at least one measured distance");
  const Scene scene{synth_mask(mask), synth_depth(depth, mask.width, mask.height)};
  FocalStack stack = render_stack(scene, params, measured_mm, options);
  if (noise.sigma > 0.0) {
    for (std::size_t i = 0; i < stack.entries.size(); ++i) {
      std::seed_seq seq{static_cast<std::uint32_t>(noise.seed), static_cast<std::uint32_t>(noise.seed >> 32),
                        static_cast<std::uint32_t>(i)};
      std::mt19937_64 gen(seq);
      stack.entries[i].image = add_gaussian_noise(stack.entries[i].image, noise.sigma, gen());
    }
  }
  return write_scene(dir, stack, PlantedTruth{params.A, params.e_mm});
}

}  // namespace psfcal
