#include "lutforge/model.hpp"

#include <stdexcept>

namespace lutforge {

namespace {

AdaptiveModel build(int n, int m, bool with_predictor, std::uint64_t seed, bool zero_fc) {
    if (n < 1) throw std::runtime_error("model needs at least one LUT");
    AdaptiveModel model;
    model.luts.reserve(n);
    model.luts.push_back(Lut3D::identity(m));
    for (int i = 1; i < n; ++i) model.luts.push_back(Lut3D::zeros(m));
    if (with_predictor) {
        std::mt19937_64 rng(seed);
        model.predictor = zero_fc ? PredictorParams::identity_init(n, rng)
                                  : PredictorParams::random_init(n, rng);
    }
    return model;
}

}  // namespace

AdaptiveModel AdaptiveModel::init(int n, int m, bool with_predictor, std::uint64_t seed) {
    return build(n, m, with_predictor, seed, false);
}

AdaptiveModel AdaptiveModel::identity_init(int n, int m, bool with_predictor, std::uint64_t seed) {
    return build(n, m, with_predictor, seed, true);
}

bool AdaptiveModel::finite() const {
    for (const Lut3D& lut : luts)
        if (!lut.finite()) return false;
    if (predictor && !predictor->finite()) return false;
    return true;
}

size_t AdaptiveModel::parameter_count() const {
    size_t total = 0;
    for (const Lut3D& lut : luts) total += lut.entries.size();
    if (predictor) total += predictor->parameter_count();
    return total;
}

ImageBuffer apply_adaptive(const AdaptiveModel& model, const ImageBuffer& image,
                           const FusionWeights& weights, int threads) {
    const Lut3D fused = fuse(model.luts, weights);
    return apply(fused, image, threads);
}

ImageBuffer apply_with_predictor(const AdaptiveModel& model, const ImageBuffer& image,
                                 int threads) {
    if (!model.predictor) throw std::runtime_error("model has no weight predictor");
    const FusionWeights w = predictor_forward(*model.predictor, image, PredictorMode::Eval);
    return apply_adaptive(model, image, w, threads);
}

}  // namespace lutforge
