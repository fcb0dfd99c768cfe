#pragma once

#include <span>
#include <vector>

#include "lutforge/model.hpp"

namespace lutforge {

// Flat views of every learnable tensor, in the fixed serialization order:
// LUT entries n=1..N, then conv blocks C1..C5 (kernel, bias), fc kernel,
// fc bias. Checkpoints and Adam buffers follow this order.
std::vector<std::span<double>> parameter_tensors(AdaptiveModel& model);
std::vector<std::span<const double>> parameter_tensors(const AdaptiveModel& model);

struct AdamConfig {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// First/second moment buffers per parameter tensor plus the shared step count.
struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    long step = 0;

    static AdamState for_model(const AdaptiveModel& model);
};

// One bias-corrected Adam update on a single tensor; `step` is the
// already-incremented step count t.
void adam_update(std::span<double> param, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, long step, const AdamConfig& cfg);

}  // namespace lutforge
