#include "lutforge/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace lutforge {

namespace {

template <typename Model, typename Span>
std::vector<Span> tensors_impl(Model& model) {
    std::vector<Span> out;
    for (auto& lut : model.luts) out.push_back(Span(lut.entries));
    if (model.predictor) {
        auto& p = *model.predictor;
        for (auto& b : p.blocks) {
            out.push_back(Span(b.kernel));
            out.push_back(Span(b.bias));
        }
        out.push_back(Span(p.fc_kernel));
        out.push_back(Span(p.fc_bias));
    }
    return out;
}

}  // namespace

std::vector<std::span<double>> parameter_tensors(AdaptiveModel& model) {
    return tensors_impl<AdaptiveModel, std::span<double>>(model);
}

std::vector<std::span<const double>> parameter_tensors(const AdaptiveModel& model) {
    return tensors_impl<const AdaptiveModel, std::span<const double>>(model);
}

AdamState AdamState::for_model(const AdaptiveModel& model) {
    AdamState state;
    for (const auto& t : parameter_tensors(model)) {
        state.m.emplace_back(t.size(), 0.0);
        state.v.emplace_back(t.size(), 0.0);
    }
    return state;
}

void adam_update(std::span<double> param, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, long step, const AdamConfig& cfg) {
    if (param.size() != grad.size() || param.size() != m.size() || param.size() != v.size())
        throw std::runtime_error("adam tensor shape mismatch");
    const double bc1 = 1.0 - std::pow(cfg.beta1, step);
    const double bc2 = 1.0 - std::pow(cfg.beta2, step);
    for (size_t i = 0; i < param.size(); ++i) {
        const double g = grad[i];
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        param[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
}

}  // namespace lutforge
