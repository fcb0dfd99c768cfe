#pragma once

#include <span>

#include "lutforge/lut3d.hpp"

namespace lutforge {

struct RegConfig {
    double lambda_s = 1e-4;
    double lambda_m = 10.0;
};

// Sum of squared differences between axis-adjacent lattice entries,
// over all three axes and all channels.
double tv_loss(const Lut3D& lut);

// Accumulate scale * d(tv_loss)/d(entry) into grad (layout of lut.entries).
void tv_loss_grad(const Lut3D& lut, double scale, std::span<double> grad);

// Sum of squared fusion weights.
double weight_l2(const FusionWeights& weights);

// tv over every basis LUT plus the weight L2 term.
double smooth_reg(std::span<const Lut3D> luts, const FusionWeights& weights);

// ReLU penalty on entry decreases along each axis, every channel.
double monotonicity_loss(const Lut3D& lut);

// Subgradient: +-1 on strictly violated pairs, 0 at ties.
void monotonicity_grad(const Lut3D& lut, double scale, std::span<double> grad);

}  // namespace lutforge
