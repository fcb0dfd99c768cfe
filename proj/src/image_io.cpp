#include "lutforge/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

namespace lutforge {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& msg) {
    throw std::runtime_error(path.string() + ": " + msg);
}

// --- PPM (P6), 8-bit and 16-bit (big-endian samples per the PNM spec) ---

int ppm_token(std::istream& in, const std::filesystem::path& path) {
    // skip whitespace and '#' comments
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
        } else if (!std::isspace(ch)) {
            break;
        }
    }
    if (ch == EOF) fail(path, "truncated PPM header");
    int value = 0;
    bool any = false;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        any = true;
        ch = in.get();
    }
    if (!any) fail(path, "malformed PPM header");
    if (ch != EOF) in.unget();
    return value;
}

ImageBuffer read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    char magic[2];
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '6') fail(path, "not a P6 PPM");
    const int width = ppm_token(in, path);
    const int height = ppm_token(in, path);
    const int maxval = ppm_token(in, path);
    in.get();  // single whitespace before raster
    if (width < 1 || height < 1) fail(path, "bad dimensions");
    if (maxval != 255 && maxval != 65535) fail(path, "unsupported maxval");
    const size_t n = static_cast<size_t>(width) * height * 3;
    if (maxval == 255) {
        std::vector<std::uint8_t> raw(n);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
        if (static_cast<size_t>(in.gcount()) != n) fail(path, "truncated pixel data");
        return ImageBuffer::from_u8(raw.data(), height, width);
    }
    std::vector<std::uint8_t> raw(n * 2);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 2));
    if (static_cast<size_t>(in.gcount()) != n * 2) fail(path, "truncated pixel data");
    std::vector<std::uint16_t> samples(n);
    for (size_t i = 0; i < n; ++i)
        samples[i] = static_cast<std::uint16_t>((raw[i * 2] << 8) | raw[i * 2 + 1]);
    return ImageBuffer::from_u16(samples.data(), height, width);
}

void write_ppm(const ImageBuffer& image, const std::filesystem::path& path, int bit_depth) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    const int maxval = bit_depth == 16 ? 65535 : 255;
    out << "P6\n" << image.width << " " << image.height << "\n" << maxval << "\n";
    const size_t n = image.value_count();
    for (size_t i = 0; i < n; ++i) {
        const double v = std::clamp(static_cast<double>(image.data[i]), 0.0, 1.0);
        const long q = std::lround(v * maxval);
        if (bit_depth == 16) {
            out.put(static_cast<char>((q >> 8) & 0xff));
            out.put(static_cast<char>(q & 0xff));
        } else {
            out.put(static_cast<char>(q & 0xff));
        }
    }
    if (!out) fail(path, "write failure");
}

// --- PNG via libpng ---

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

ImageBuffer read_png(const std::filesystem::path& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, "cannot open");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "libpng init failure");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "PNG decode error");
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    if (depth < 8) png_set_expand(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);
    const size_t rowbytes = png_get_rowbytes(png, info);
    std::vector<std::uint8_t> raster(rowbytes * height);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = raster.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const size_t n = static_cast<size_t>(width) * height * 3;
    if (depth == 16) {
        std::vector<std::uint16_t> samples(n);
        for (size_t i = 0; i < n; ++i)
            samples[i] = static_cast<std::uint16_t>((raster[i * 2] << 8) | raster[i * 2 + 1]);
        return ImageBuffer::from_u16(samples.data(), height, width);
    }
    return ImageBuffer::from_u8(raster.data(), height, width);
}

void write_png(const ImageBuffer& image, const std::filesystem::path& path, int bit_depth) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail(path, "cannot open for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(path, "libpng init failure");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "PNG encode error");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, image.width, image.height, bit_depth, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const int maxval = bit_depth == 16 ? 65535 : 255;
    const size_t rowvals = static_cast<size_t>(image.width) * 3;
    std::vector<std::uint8_t> row(rowvals * (bit_depth == 16 ? 2 : 1));
    for (int y = 0; y < image.height; ++y) {
        for (size_t i = 0; i < rowvals; ++i) {
            const double v = std::clamp(
                static_cast<double>(image.data[static_cast<size_t>(y) * rowvals + i]), 0.0, 1.0);
            const long q = std::lround(v * maxval);
            if (bit_depth == 16) {
                row[i * 2] = static_cast<std::uint8_t>((q >> 8) & 0xff);
                row[i * 2 + 1] = static_cast<std::uint8_t>(q & 0xff);
            } else {
                row[i] = static_cast<std::uint8_t>(q & 0xff);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

ImageBuffer read_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) fail(path, "cannot open");
    unsigned char sig[8] = {0};
    probe.read(reinterpret_cast<char*>(sig), 8);
    probe.close();
    if (sig[0] == 'P' && sig[1] == '6') return read_ppm(path);
    if (!png_sig_cmp(sig, 0, 8)) return read_png(path);
    fail(path, "unsupported image format");
}

void write_image(const ImageBuffer& image, const std::filesystem::path& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        fail(path, "bit depth must be 8 or 16");
    const auto ext = path.extension().string();
    if (ext == ".ppm" || ext == ".PPM") {
        write_ppm(image, path, bit_depth);
    } else if (ext == ".png" || ext == ".PNG") {
        write_png(image, path, bit_depth);
    } else {
        fail(path, "unsupported output extension");
    }
}

}  // namespace lutforge
