#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lutforge/adam.hpp"
#include "lutforge/model.hpp"

namespace lutforge {

struct SamplePair {
    ImageBuffer input;
    ImageBuffer target;  // same dimensions as input
};

struct TrainConfig {
    double learning_rate = 1e-4;
    double lambda_s = 1e-4;
    double lambda_m = 10.0;
    int num_luts = 3;
    int lattice = 33;
    int epochs = 40;
    std::uint64_t seed = 0x1a3d1u;
    bool augment = true;
    AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon}; }
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    // When set, fusion weights are pinned and the predictor is bypassed.
    std::optional<std::vector<double>> fixed_weights;
    int threads = 0;
};

struct LossBreakdown {
    double mse = 0;
    double r_s = 0;
    double r_m = 0;
    double total = 0;
};

// Mean squared difference over all pixel-channel values.
double mse_loss(const ImageBuffer& output, const ImageBuffer& target);

ImageBuffer flip_horizontal(const ImageBuffer& image);

// Identical random crop (scale in [0.6,1.0]) and flip on both images;
// brightness and saturation jitter (factors in [0.8,1.2]) on the input only.
SamplePair augment(const SamplePair& pair, std::mt19937_64& rng);

// One forward/backward pass and one Adam update on every parameter.
// Throws "divergence" (leaving the model untouched) on a non-finite loss.
LossBreakdown train_step(AdaptiveModel& model, const SamplePair& pair, const TrainConfig& config,
                         AdamState& adam, std::mt19937_64& dropout_rng);

struct Dataset {
    std::vector<SamplePair> pairs;
};

// Plain-text manifest: one "input_path<TAB>target_path" line per sample,
// paths relative to the manifest. Unreadable samples are skipped with a
// warning on stderr; an empty result is an error.
Dataset load_manifest(const std::filesystem::path& manifest);

struct StepRecord {
    int epoch = 0;
    long step = 0;
    double mse = 0, r_s = 0, r_m = 0, total = 0, psnr = 0;
};

struct EpochStats {
    int epoch = 0;
    double mse = 0, r_s = 0, r_m = 0, total = 0, psnr = 0;
};

struct TrainResult {
    std::vector<StepRecord> steps;
    std::vector<EpochStats> epochs;
};

struct TrainOptions {
    // When set: metrics.csv, per-epoch checkpoint.ckpt and best.ckpt go here.
    std::optional<std::filesystem::path> out_dir;
    bool record_steps = true;
};

TrainResult train(AdaptiveModel& model, const Dataset& dataset, const TrainConfig& config,
                  const TrainOptions& options = {});

}  // namespace lutforge
