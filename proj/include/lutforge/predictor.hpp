#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "lutforge/image.hpp"
#include "lutforge/lut3d.hpp"

namespace lutforge {

// Channel-major activation tensor (C x H x W).
struct FeatureMap {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(int c, int h, int w)
        : channels(c), height(h), width(w), data(static_cast<size_t>(c) * h * w, 0.0) {}

    double& at(int c, int y, int x) {
        return data[(static_cast<size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<size_t>(c) * height + y) * width + x];
    }
};

// One conv block: 3x3 conv, stride 2, pad 1, followed by leaky ReLU and
// instance normalization (no affine).
struct ConvBlockParams {
    int in_channels = 0;
    int out_channels = 0;
    std::vector<double> kernel;  // out * in * 3 * 3
    std::vector<double> bias;    // out
    double negative_slope = 0.2;

    ConvBlockParams() = default;
    ConvBlockParams(int in_ch, int out_ch)
        : in_channels(in_ch),
          out_channels(out_ch),
          kernel(static_cast<size_t>(out_ch) * in_ch * 9, 0.0),
          bias(out_ch, 0.0) {}

    size_t parameter_count() const { return kernel.size() + bias.size(); }
};

enum class PredictorMode { Train, Eval };

// The full weight predictor: five stride-2 conv blocks
// (3->16->32->64->128->128, spatial 256->128->64->32->16->8),
// dropout on the 128x8x8 map, then a fully-connected head to N weights.
struct PredictorParams {
    std::array<ConvBlockParams, 5> blocks;
    int num_outputs = 0;            // N
    std::vector<double> fc_kernel;  // N * 128 * 8 * 8
    std::vector<double> fc_bias;    // N
    double dropout_rate = 0.5;

    static constexpr std::array<int, 6> kChannelPlan{3, 16, 32, 64, 128, 128};
    static constexpr int kInputSize = 256;
    static constexpr int kHeadSpatial = 8;

    // Glorot-uniform conv and fc kernels; fc bias set to 1 so the initial
    // predicted weights are close to (1,...,1).
    static PredictorParams random_init(int n, std::mt19937_64& rng);
    // Same, but with a zero fc kernel: predicted weights are exactly (1,...,1).
    static PredictorParams identity_init(int n, std::mt19937_64& rng);

    size_t parameter_count() const;
    bool finite() const;
};

// Saved forward state needed for the handwritten backward pass.
struct PredictorActivations {
    FeatureMap input;                          // 3 x 256 x 256
    std::array<FeatureMap, 5> conv_out;        // pre-activation
    std::array<FeatureMap, 5> relu_out;
    std::array<FeatureMap, 5> norm_out;
    std::array<std::vector<double>, 5> mean;    // per channel
    std::array<std::vector<double>, 5> invstd;  // per channel
    std::vector<double> dropout_mask;           // multiplier per unit (0 or 1/keep)
    std::vector<double> head_input;             // post-dropout 128*8*8
};

struct PredictorGrads {
    std::array<std::vector<double>, 5> kernel;
    std::array<std::vector<double>, 5> bias;
    std::vector<double> fc_kernel;
    std::vector<double> fc_bias;

    static PredictorGrads zeros_like(const PredictorParams& p);
    void accumulate_scaled(const PredictorGrads& other, double scale);
};

// --- layer primitives ---

// Resize to out_h x out_w with bilinear sampling, align-corners false.
// Constant images are preserved exactly.
ImageBuffer resize_bilinear(const ImageBuffer& image, int out_h, int out_w);

FeatureMap conv2d_s2(const FeatureMap& input, const ConvBlockParams& params);
void conv2d_s2_backward(const FeatureMap& input, const ConvBlockParams& params,
                        const FeatureMap& grad_out, std::span<double> grad_kernel,
                        std::span<double> grad_bias, FeatureMap& grad_input);

FeatureMap leaky_relu(const FeatureMap& x, double slope);
FeatureMap leaky_relu_backward(const FeatureMap& x, const FeatureMap& grad_out, double slope);

inline constexpr double kInstanceNormEps = 1e-5;

// Per-channel normalization to zero mean / unit variance; returns saved
// statistics through `mean` and `invstd` for the backward pass.
FeatureMap instance_norm(const FeatureMap& x, std::vector<double>& mean,
                         std::vector<double>& invstd);
FeatureMap instance_norm_backward(const FeatureMap& normed, const std::vector<double>& invstd,
                                  const FeatureMap& grad_out);

// Inverted dropout: zero with probability `rate`, scale survivors by 1/(1-rate).
// Eval mode is the identity and consumes no randomness.
std::vector<double> dropout_mask(size_t n, double rate, PredictorMode mode, std::mt19937_64& rng);

FusionWeights fc_head(const FeatureMap& x, const PredictorParams& params);

// --- whole-model forward / backward ---

FusionWeights predictor_forward(const PredictorParams& params, const ImageBuffer& image,
                                PredictorMode mode, std::mt19937_64* dropout_rng = nullptr,
                                PredictorActivations* saved = nullptr);

void predictor_backward(const PredictorParams& params, const PredictorActivations& saved,
                        std::span<const double> upstream, PredictorGrads& grads);

}  // namespace lutforge
