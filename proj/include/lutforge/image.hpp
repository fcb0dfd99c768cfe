#pragma once

#include <cstdint>
#include <vector>

namespace lutforge {

// H x W x 3 interleaved RGB, normalized to [0,1] on ingest from integer sources.
// Values produced by LUT application may leave [0,1]; clamping happens at export.
struct ImageBuffer {
    int height = 0;
    int width = 0;
    std::vector<float> data;  // height * width * 3, row-major, RGB interleaved

    ImageBuffer() = default;
    ImageBuffer(int h, int w) : height(h), width(w), data(static_cast<size_t>(h) * w * 3, 0.0f) {}

    float& at(int y, int x, int c) { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
    float at(int y, int x, int c) const { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }

    size_t pixel_count() const { return static_cast<size_t>(height) * width; }
    size_t value_count() const { return pixel_count() * 3; }

    static ImageBuffer from_u8(const std::uint8_t* src, int h, int w);
    static ImageBuffer from_u16(const std::uint16_t* src, int h, int w);

    // Clamp every value into [0,1] (export-time semantics).
    void clamp01();
};

}  // namespace lutforge
