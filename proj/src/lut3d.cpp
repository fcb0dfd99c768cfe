#include "lutforge/lut3d.hpp"

#include <cmath>
#include <stdexcept>

#include "lutforge/parallel.hpp"

namespace lutforge {

Lut3D::Lut3D(int m) {
    if (m < 2) throw std::runtime_error("lattice size must be at least 2");
    size = m;
    entries.assign(3ull * m * m * m, 0.0);
}

Lut3D Lut3D::identity(int m) {
    Lut3D lut(m);
    const double s = lut.spacing();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                lut.at(0, i, j, k) = i * s;
                lut.at(1, i, j, k) = j * s;
                lut.at(2, i, j, k) = k * s;
            }
    return lut;
}

Lut3D Lut3D::zeros(int m) { return Lut3D(m); }

bool Lut3D::finite() const {
    for (double v : entries)
        if (!std::isfinite(v)) return false;
    return true;
}

CellLocation locate(const Rgb& color, int m) {
    if (m < 2) throw std::runtime_error("lattice size must be at least 2");
    CellLocation loc;
    int* base[3] = {&loc.i, &loc.j, &loc.k};
    double* frac[3] = {&loc.dx, &loc.dy, &loc.dz};
    for (int c = 0; c < 3; ++c) {
        double v = color[c];
        if (!std::isfinite(v)) throw std::runtime_error("invalid color");
        if (v < 0.0) v = 0.0;
        if (v > 1.0) v = 1.0;
        double t = v * (m - 1);
        int idx = static_cast<int>(t);
        if (idx > m - 2) idx = m - 2;
        *base[c] = idx;
        *frac[c] = t - idx;
    }
    return loc;
}

namespace {
// endpoint-exact: t=0 gives a, t=1 gives b bit-for-bit
inline double lerp(double a, double b, double t) { return t == 1.0 ? b : a + t * (b - a); }
}  // namespace

Rgb trilinear_forward(const Lut3D& lut, const Rgb& color) {
    const CellLocation loc = locate(color, lut.size);
    const int m = lut.size;
    const size_t mm = static_cast<size_t>(m) * m;
    Rgb out;
    for (int c = 0; c < 3; ++c) {
        const double* plane = lut.entries.data() + static_cast<size_t>(c) * mm * m;
        const size_t b = (static_cast<size_t>(loc.i) * m + loc.j) * m + loc.k;
        // lerp k, then j, then i; constant directions drop out exactly
        const double c00 = lerp(plane[b], plane[b + 1], loc.dz);
        const double c01 = lerp(plane[b + m], plane[b + m + 1], loc.dz);
        const double c10 = lerp(plane[b + mm], plane[b + mm + 1], loc.dz);
        const double c11 = lerp(plane[b + mm + m], plane[b + mm + m + 1], loc.dz);
        const double c0 = lerp(c00, c01, loc.dy);
        const double c1 = lerp(c10, c11, loc.dy);
        out[c] = lerp(c0, c1, loc.dx);
    }
    return out;
}

std::array<double, 8> corner_weights(const CellLocation& loc) {
    const double dx = loc.dx, dy = loc.dy, dz = loc.dz;
    // order: (i,j,k),(i,j,k+1),(i,j+1,k),(i,j+1,k+1),(i+1,j,k),(i+1,j,k+1),(i+1,j+1,k),(i+1,j+1,k+1)
    return {(1 - dx) * (1 - dy) * (1 - dz), (1 - dx) * (1 - dy) * dz,
            (1 - dx) * dy * (1 - dz),       (1 - dx) * dy * dz,
            dx * (1 - dy) * (1 - dz),       dx * (1 - dy) * dz,
            dx * dy * (1 - dz),             dx * dy * dz};
}

void trilinear_backward(const Lut3D& lut, const Rgb& color, const Rgb& upstream_grad,
                        std::span<double> entry_grads) {
    const CellLocation loc = locate(color, lut.size);
    const int m = lut.size;
    const size_t mm = static_cast<size_t>(m) * m;
    const auto w = corner_weights(loc);
    const size_t offs[8] = {0, 1, static_cast<size_t>(m), static_cast<size_t>(m) + 1,
                            mm, mm + 1, mm + m, mm + m + 1};
    for (int c = 0; c < 3; ++c) {
        const size_t b = static_cast<size_t>(c) * mm * m +
                         (static_cast<size_t>(loc.i) * m + loc.j) * m + loc.k;
        for (int q = 0; q < 8; ++q) entry_grads[b + offs[q]] += upstream_grad[c] * w[q];
    }
}

Lut3D fuse(std::span<const Lut3D> luts, const FusionWeights& weights) {
    if (luts.empty()) throw std::runtime_error("fuse requires at least one LUT");
    if (weights.w.size() != luts.size()) throw std::runtime_error("weight count mismatch");
    const int m = luts.front().size;
    for (const Lut3D& lut : luts)
        if (lut.size != m) throw std::runtime_error("lattice size mismatch");
    Lut3D out(m);
    const size_t n = out.entries.size();
    for (size_t nlut = 0; nlut < luts.size(); ++nlut) {
        const double w = weights.w[nlut];
        const double* src = luts[nlut].entries.data();
        double* dst = out.entries.data();
        for (size_t e = 0; e < n; ++e) dst[e] += w * src[e];
    }
    if (!out.finite()) throw std::runtime_error("fused LUT has non-finite entries");
    return out;
}

std::vector<double> fusion_weight_gradient(std::span<const Lut3D> luts,
                                           std::span<const double> fused_entry_grads) {
    std::vector<double> grads(luts.size(), 0.0);
    for (size_t nlut = 0; nlut < luts.size(); ++nlut) {
        if (luts[nlut].entries.size() != fused_entry_grads.size())
            throw std::runtime_error("gradient shape mismatch");
        double acc = 0.0;
        const double* src = luts[nlut].entries.data();
        for (size_t e = 0; e < fused_entry_grads.size(); ++e) acc += fused_entry_grads[e] * src[e];
        grads[nlut] = acc;
    }
    return grads;
}

ImageBuffer apply(const Lut3D& lut, const ImageBuffer& image, int threads) {
    ImageBuffer out(image.height, image.width);
    parallel_for(image.height, threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const float* src = &image.data[static_cast<size_t>(y) * image.width * 3];
            float* dst = &out.data[static_cast<size_t>(y) * image.width * 3];
            for (int x = 0; x < image.width; ++x) {
                const Rgb in{src[x * 3], src[x * 3 + 1], src[x * 3 + 2]};
                const Rgb o = trilinear_forward(lut, in);
                dst[x * 3] = static_cast<float>(o[0]);
                dst[x * 3 + 1] = static_cast<float>(o[1]);
                dst[x * 3 + 2] = static_cast<float>(o[2]);
            }
        }
    });
    return out;
}

}  // namespace lutforge
