#include "lutforge/image.hpp"

#include <algorithm>

namespace lutforge {

ImageBuffer ImageBuffer::from_u8(const std::uint8_t* src, int h, int w) {
    ImageBuffer out(h, w);
    const size_t n = out.value_count();
    for (size_t idx = 0; idx < n; ++idx) {
        out.data[idx] = static_cast<float>(src[idx]) / 255.0f;
    }
    return out;
}

ImageBuffer ImageBuffer::from_u16(const std::uint16_t* src, int h, int w) {
    ImageBuffer out(h, w);
    const size_t n = out.value_count();
    for (size_t idx = 0; idx < n; ++idx) {
        out.data[idx] = static_cast<float>(src[idx]) / 65535.0f;
    }
    return out;
}

void ImageBuffer::clamp01() {
    for (float& v : data) v = std::clamp(v, 0.0f, 1.0f);
}

}  // namespace lutforge
