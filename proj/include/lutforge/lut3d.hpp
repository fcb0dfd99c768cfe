#pragma once

#include <array>
#include <span>
#include <vector>

#include "lutforge/image.hpp"

namespace lutforge {

using Rgb = std::array<double, 3>;

// Dense M x M x M lattice of output RGB values.
// Memory order: channel-major, then i (red axis), j (green), k (blue),
// with k varying fastest. Indexing colors are implicit: (i*s, j*s, k*s)
// with s = 1/(M-1), domain [0,1].
struct Lut3D {
    int size = 0;                 // M, lattice points per axis
    std::vector<double> entries;  // 3 * M^3

    Lut3D() = default;
    explicit Lut3D(int m);

    static Lut3D identity(int m);
    static Lut3D zeros(int m);

    double spacing() const { return 1.0 / (size - 1); }

    size_t index(int c, int i, int j, int k) const {
        return ((static_cast<size_t>(c) * size + i) * size + j) * size + k;
    }
    double& at(int c, int i, int j, int k) { return entries[index(c, i, j, k)]; }
    double at(int c, int i, int j, int k) const { return entries[index(c, i, j, k)]; }

    bool finite() const;
};

struct CellLocation {
    int i = 0, j = 0, k = 0;        // base lattice indices, in [0, M-2]
    double dx = 0, dy = 0, dz = 0;  // fractional offsets, in [0,1]
};

// Per-basis-LUT fusion weights predicted by the CNN; unconstrained sign.
struct FusionWeights {
    std::vector<double> w;
};

// Map a color to its lattice cell. Components outside [0,1] are clamped
// (float noise tolerance); non-finite components are an error.
// Inputs exactly at 1.0 land in the last cell with offset 1.0.
CellLocation locate(const Rgb& color, int m);

// Eq.-style 8-corner interpolation, computed as nested lerps so that
// exact lattice inputs return stored entries exactly.
Rgb trilinear_forward(const Lut3D& lut, const Rgb& color);

// The 8 corner weights used by trilinear_forward, matching CellLocation.
std::array<double, 8> corner_weights(const CellLocation& loc);

// Accumulate upstream_grad[c] * corner_weight into the touched entries of
// `entry_grads` (same layout/length as lut.entries). Input-color gradients
// are not produced; pixels are leaves in this model.
void trilinear_backward(const Lut3D& lut, const Rgb& color, const Rgb& upstream_grad,
                        std::span<double> entry_grads);

// Entry-wise weighted sum of basis LUTs into one image-adaptive LUT.
Lut3D fuse(std::span<const Lut3D> luts, const FusionWeights& weights);

// d(loss)/d(w_n) = sum over entries of fused-entry gradient times basis entry.
std::vector<double> fusion_weight_gradient(std::span<const Lut3D> luts,
                                           std::span<const double> fused_entry_grads);

// Per-pixel trilinear transform, partitioned across rows. Output does not
// depend on the thread count; no clamping (see export paths).
ImageBuffer apply(const Lut3D& lut, const ImageBuffer& image, int threads = 0);

}  // namespace lutforge
