#include "lutforge/cube_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lutforge {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, int line, const std::string& msg) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

void write_cube(const Lut3D& lut, const std::filesystem::path& path, const std::string& title) {
    if (!lut.finite()) throw std::runtime_error("cannot export non-finite LUT");
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    if (!title.empty()) out << "TITLE \"" << title << "\"\n";
    out << "LUT_3D_SIZE " << lut.size << "\n";
    out << "DOMAIN_MIN 0.0 0.0 0.0\n";
    out << "DOMAIN_MAX 1.0 1.0 1.0\n";
    char buf[64];
    for (int b = 0; b < lut.size; ++b)
        for (int g = 0; g < lut.size; ++g)
            for (int r = 0; r < lut.size; ++r) {
                std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f\n", lut.at(0, r, g, b),
                              lut.at(1, r, g, b), lut.at(2, r, g, b));
                out << buf;
            }
    if (!out) throw std::runtime_error(path.string() + ": write failure");
}

Lut3D read_cube(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");
    int size = 0;
    std::vector<double> data;
    size_t expected = 0;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;  // blank or comment-only
        if (first == "TITLE") continue;
        if (first == "DOMAIN_MIN" || first == "DOMAIN_MAX") continue;
        if (first == "LUT_1D_SIZE") fail(path, lineno, "1D LUTs are not supported");
        if (first == "LUT_3D_SIZE") {
            if (!(ls >> size) || size < 2) fail(path, lineno, "malformed LUT_3D_SIZE");
            expected = 3ull * size * size * size;
            data.reserve(expected);
            continue;
        }
        // data line
        if (size == 0) fail(path, lineno, "data before LUT_3D_SIZE");
        double r, g, b;
        std::istringstream ds(line);
        if (!(ds >> r >> g >> b)) fail(path, lineno, "malformed data line");
        if (!std::isfinite(r) || !std::isfinite(g) || !std::isfinite(b))
            fail(path, lineno, "non-finite value");
        data.push_back(r);
        data.push_back(g);
        data.push_back(b);
        if (data.size() > expected) fail(path, lineno, "too many data lines");
    }
    if (size == 0) fail(path, lineno, "missing LUT_3D_SIZE");
    if (data.size() != expected)
        fail(path, lineno, "expected " + std::to_string(expected / 3) + " data lines, got " +
                               std::to_string(data.size() / 3));
    Lut3D lut(size);
    size_t idx = 0;
    for (int b = 0; b < size; ++b)
        for (int g = 0; g < size; ++g)
            for (int r = 0; r < size; ++r) {
                lut.at(0, r, g, b) = data[idx++];
                lut.at(1, r, g, b) = data[idx++];
                lut.at(2, r, g, b) = data[idx++];
            }
    return lut;
}

}  // namespace lutforge
