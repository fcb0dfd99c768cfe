#pragma once

#include <filesystem>
#include <string>

#include "lutforge/lut3d.hpp"

namespace lutforge {

// Adobe/IRIDAS .cube dialect: TITLE, LUT_3D_SIZE, DOMAIN_MIN/MAX headers,
// then M^3 data lines "r g b" (6 decimals) with the red index varying
// fastest, then green, then blue.
void write_cube(const Lut3D& lut, const std::filesystem::path& path,
                const std::string& title = "");

// Accepts '#' comments, blank lines, arbitrary whitespace, missing TITLE.
// Malformed input is rejected with the offending line number.
Lut3D read_cube(const std::filesystem::path& path);

}  // namespace lutforge
