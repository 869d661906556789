#pragma once

#include "defence/image.hpp"

#include <filesystem>

namespace defence {

class FenceMask;

/// Reads an 8-bit PNG. Grayscale files come back with three identical planes;
/// alpha is dropped. 16-bit files are rejected.
ColorImage read_image(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG; values are rounded and clamped to [0, 255].
void write_image(const std::filesystem::path& path, const ColorImage& img);

/// Writes an 8-bit grayscale PNG.
void write_image(const std::filesystem::path& path, const ImagePlane& img);

/// Reads a mask PNG: pixels >= 128 are valid, darker pixels are fence.
FenceMask read_mask(const std::filesystem::path& path);

/// Writes a mask PNG with 0 = fence, 255 = valid.
void write_mask(const std::filesystem::path& path, const FenceMask& mask);

}  // namespace defence
