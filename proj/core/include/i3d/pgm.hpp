#pragma once

#include <filesystem>

#include "i3d/image.hpp"

namespace i3d {

// Binary PGM (P5) with maxval 255 or 65535; intensities map linearly to
// [0,1]. Values outside [0,1] are clamped on write.
void write_pgm(const Image& img, const std::filesystem::path& path, int maxval = 255);
Image read_pgm(const std::filesystem::path& path);

// Grayscale PFM ("Pf", little-endian, bottom-up rows) for float-valued
// companions such as depth, normal components, and disparity maps.
void write_pfm(const Image& img, const std::filesystem::path& path);
Image read_pfm(const std::filesystem::path& path);

}  // namespace i3d
