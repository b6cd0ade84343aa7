#pragma once

#include <filesystem>

#include "psfcal/image.hpp"

namespace psfcal {

// 8-bit PNG. Intensities map 0 -> 0.0 and 255 -> 1.0; writing rounds to the
// nearest code. Gray (1 channel) and RGB (3 channels) are written as such;
// on read, gray+alpha and RGBA drop the alpha channel and 16-bit samples
// are scaled by 1/65535.
[[nodiscard]] Image read_png(const std::filesystem::path& path);
void write_png(const Image& img, const std::filesystem::path& path);

// Single-channel PFM: "Pf\n<w> <h>\n-1.0\n", little-endian float32, rows
// stored bottom-to-top. Big-endian files (positive scale) are also read.
[[nodiscard]] DepthMap read_pfm(const std::filesystem::path& path);
void write_pfm(const DepthMap& depth, const std::filesystem::path& path);

}  // namespace psfcal
