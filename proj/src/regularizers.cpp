#include "lutforge/regularizers.hpp"

namespace lutforge {

namespace {

// Visit each axis-adjacent pair (entry at idx, neighbor at idx+step).
template <typename Fn>
void for_each_pair(const Lut3D& lut, Fn&& fn) {
    const int m = lut.size;
    const size_t mm = static_cast<size_t>(m) * m;
    for (int c = 0; c < 3; ++c) {
        const size_t cbase = static_cast<size_t>(c) * mm * m;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) {
                    const size_t idx = cbase + (static_cast<size_t>(i) * m + j) * m + k;
                    if (i + 1 < m) fn(idx, idx + mm);
                    if (j + 1 < m) fn(idx, idx + m);
                    if (k + 1 < m) fn(idx, idx + 1);
                }
    }
}

}  // namespace

double tv_loss(const Lut3D& lut) {
    double total = 0.0;
    for_each_pair(lut, [&](size_t a, size_t b) {
        const double d = lut.entries[b] - lut.entries[a];
        total += d * d;
    });
    return total;
}

void tv_loss_grad(const Lut3D& lut, double scale, std::span<double> grad) {
    for_each_pair(lut, [&](size_t a, size_t b) {
        const double d = lut.entries[b] - lut.entries[a];
        grad[b] += scale * 2.0 * d;
        grad[a] -= scale * 2.0 * d;
    });
}

double weight_l2(const FusionWeights& weights) {
    double total = 0.0;
    for (double w : weights.w) total += w * w;
    return total;
}

double smooth_reg(std::span<const Lut3D> luts, const FusionWeights& weights) {
    double total = 0.0;
    for (const Lut3D& lut : luts) total += tv_loss(lut);
    return total + weight_l2(weights);
}

double monotonicity_loss(const Lut3D& lut) {
    double total = 0.0;
    for_each_pair(lut, [&](size_t a, size_t b) {
        const double d = lut.entries[a] - lut.entries[b];
        if (d > 0) total += d;
    });
    return total;
}

void monotonicity_grad(const Lut3D& lut, double scale, std::span<double> grad) {
    for_each_pair(lut, [&](size_t a, size_t b) {
        if (lut.entries[a] - lut.entries[b] > 0) {
            grad[a] += scale;
            grad[b] -= scale;
        }
    });
}

}  // namespace lutforge
