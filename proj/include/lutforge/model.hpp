#pragma once

#include <optional>
#include <vector>

#include "lutforge/lut3d.hpp"
#include "lutforge/predictor.hpp"

namespace lutforge {

// N basis LUTs plus (optionally) the CNN weight predictor.
// Initialization: LUT 1 is the identity map, LUTs 2..N are zero maps,
// the fc bias is 1, so the initial adaptive transform is the identity.
struct AdaptiveModel {
    std::vector<Lut3D> luts;
    std::optional<PredictorParams> predictor;

    int lut_count() const { return static_cast<int>(luts.size()); }
    int lattice() const { return luts.empty() ? 0 : luts.front().size; }

    static AdaptiveModel init(int n, int m, bool with_predictor, std::uint64_t seed);
    // Variant with a zero fc kernel: predicted weights are exactly (1,...,1).
    static AdaptiveModel identity_init(int n, int m, bool with_predictor, std::uint64_t seed);

    bool finite() const;
    size_t parameter_count() const;
};

// Fuse once, interpolate once (the production inference path).
ImageBuffer apply_adaptive(const AdaptiveModel& model, const ImageBuffer& image,
                           const FusionWeights& weights, int threads = 0);

// Predict weights (eval mode) then apply; requires a predictor.
ImageBuffer apply_with_predictor(const AdaptiveModel& model, const ImageBuffer& image,
                                 int threads = 0);

}  // namespace lutforge
