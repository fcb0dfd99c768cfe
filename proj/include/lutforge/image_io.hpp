#pragma once

#include <filesystem>

#include "lutforge/image.hpp"

namespace lutforge {

// 8/16-bit PNG and binary PPM (P6); values normalized to [0,1] on read.
ImageBuffer read_image(const std::filesystem::path& path);

// Format chosen by extension (.png / .ppm). Values are clamped to [0,1]
// and quantized round-half-up at the requested bit depth (8 or 16).
void write_image(const ImageBuffer& image, const std::filesystem::path& path, int bit_depth = 8);

}  // namespace lutforge
