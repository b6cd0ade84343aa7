#include "psfcal/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "psfcal/errors.hpp"

namespace psfcal {

Image read_png(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw IoError("cannot read PNG " + path.string() + ": " + png.message);
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool alpha = (png.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  // 16-bit files come back linear (no sRGB conversion); 8-bit are passed through.
  const bool wide = (png.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  png.format = (color ? PNG_FORMAT_FLAG_COLOR : 0u) | (alpha ? PNG_FORMAT_FLAG_ALPHA : 0u) |
               (wide ? PNG_FORMAT_FLAG_LINEAR : 0u);
  const int channels = color ? 3 : 1;
  const int stored = channels + (alpha ? 1 : 0);
  const std::size_t pixels = static_cast<std::size_t>(png.width) * png.height;
  std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, bytes.data(), 0, nullptr)) {
    const std::string message = png.message;
    png_image_free(&png);
    throw IoError("cannot decode PNG " + path.string() + ": " + message);
  }
  std::vector<double> data(pixels * channels);
  for (std::size_t p = 0; p < pixels; ++p) {
    if (wide) {
      std::uint16_t px[4];
      std::memcpy(px, bytes.data() + p * stored * 2, stored * 2);
      // linear output with alpha is premultiplied
      const double a = alpha ? px[channels] / 65535.0 : 1.0;
      for (int c = 0; c < channels; ++c) data[p * channels + c] = a > 0.0 ? std::min(1.0, px[c] / 65535.0 / a) : 0.0;
    } else {
      for (int c = 0; c < channels; ++c) data[p * channels + c] = bytes[p * stored + c] / 255.0;
    }
  }
  return Image(static_cast<int>(png.width), static_cast<int>(png.height), channels, std::move(data));
}

void write_png(const Image& img, const std::filesystem::path& path) {
  if (img.empty()) throw ContractViolation("cannot write an empty image");
  img.validate();
  std::vector<std::uint8_t> bytes(img.data().size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<std::uint8_t>(std::lround(img.data()[i] * 255.0));
  }
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + png.message);
  }
}

namespace {

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0x0000FF00u) | ((v << 8) & 0x00FF0000u) | (v << 24);
}

std::string read_token(std::istream& in, const std::filesystem::path& path, const char* field) {
  std::string token;
  if (!(in >> token)) throw IoError(path.string() + ": truncated PFM header (missing " + field + ")");
  return token;
}

}  // namespace

DepthMap read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open depth map " + path.string());

  const std::string magic = read_token(in, path, "magic");
  if (magic == "PF") throw IoError(path.string() + ": colour PFM, expected single-channel 'Pf'");
  if (magic != "Pf") throw IoError(path.string() + ": not a PFM file (magic '" + magic + "')");

  int width = 0;
  int height = 0;
  double scale = 0.0;
  try {
    width = std::stoi(read_token(in, path, "width"));
    height = std::stoi(read_token(in, path, "height"));
    scale = std::stod(read_token(in, path, "scale"));
  } catch (const std::logic_error&) {
    throw IoError(path.string() + ": malformed PFM header");
  }
  if (width < 1 || height < 1) throw IoError(path.string() + ": PFM dimensions must be positive");
  if (scale == 0.0) throw IoError(path.string() + ": PFM scale must be non-zero");
  in.get();  // single whitespace byte before the raster

  const bool file_little = scale < 0.0;
  const bool host_little = std::endian::native == std::endian::little;
  std::vector<float> data(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  std::vector<std::uint32_t> row(static_cast<std::size_t>(width));
  for (int y = height - 1; y >= 0; --y) {
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * 4))) {
      throw IoError(path.string() + ": truncated PFM raster");
    }
    for (int x = 0; x < width; ++x) {
      const std::uint32_t bits = file_little == host_little ? row[x] : byteswap32(row[x]);
      data[static_cast<std::size_t>(y) * width + x] = std::bit_cast<float>(bits);
    }
  }
  return DepthMap(width, height, std::move(data));
}

void write_pfm(const DepthMap& depth, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open depth map for writing: " + path.string());
  out << "Pf\n" << depth.width() << ' ' << depth.height() << "\n-1.0\n";
  const bool host_little = std::endian::native == std::endian::little;
  std::vector<std::uint32_t> row(static_cast<std::size_t>(depth.width()));
  for (int y = depth.height() - 1; y >= 0; --y) {
    for (int x = 0; x < depth.width(); ++x) {
      const auto bits = std::bit_cast<std::uint32_t>(depth.at(x, y));
      row[x] = host_little ? bits : byteswap32(bits);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
  }
  out.flush();
  if (!out) throw IoError("failed writing depth map " + path.string());
}

}  // namespace psfcal
