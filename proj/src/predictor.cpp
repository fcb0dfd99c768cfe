#include "lutforge/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lutforge {

namespace {

void glorot_fill(std::vector<double>& w, int fan_in, int fan_out, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : w) v = dist(rng);
}

PredictorParams make_base(int n, std::mt19937_64& rng) {
    if (n < 1) throw std::runtime_error("predictor needs at least one output weight");
    PredictorParams p;
    p.num_outputs = n;
    for (int b = 0; b < 5; ++b) {
        const int in_ch = PredictorParams::kChannelPlan[b];
        const int out_ch = PredictorParams::kChannelPlan[b + 1];
        p.blocks[b] = ConvBlockParams(in_ch, out_ch);
        glorot_fill(p.blocks[b].kernel, in_ch * 9, out_ch * 9, rng);
    }
    const int head = PredictorParams::kChannelPlan[5] * PredictorParams::kHeadSpatial *
                     PredictorParams::kHeadSpatial;
    p.fc_kernel.assign(static_cast<size_t>(n) * head, 0.0);
    p.fc_bias.assign(n, 1.0);
    return p;
}

}  // namespace

PredictorParams PredictorParams::random_init(int n, std::mt19937_64& rng) {
    PredictorParams p = make_base(n, rng);
    const int head = kChannelPlan[5] * kHeadSpatial * kHeadSpatial;
    glorot_fill(p.fc_kernel, head, n, rng);
    return p;
}

PredictorParams PredictorParams::identity_init(int n, std::mt19937_64& rng) {
    return make_base(n, rng);  // fc kernel stays zero, bias stays 1
}

size_t PredictorParams::parameter_count() const {
    size_t total = fc_kernel.size() + fc_bias.size();
    for (const auto& b : blocks) total += b.parameter_count();
    return total;
}

bool PredictorParams::finite() const {
    auto ok = [](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };
    for (const auto& b : blocks)
        if (!ok(b.kernel) || !ok(b.bias)) return false;
    return ok(fc_kernel) && ok(fc_bias);
}

PredictorGrads PredictorGrads::zeros_like(const PredictorParams& p) {
    PredictorGrads g;
    for (int b = 0; b < 5; ++b) {
        g.kernel[b].assign(p.blocks[b].kernel.size(), 0.0);
        g.bias[b].assign(p.blocks[b].bias.size(), 0.0);
    }
    g.fc_kernel.assign(p.fc_kernel.size(), 0.0);
    g.fc_bias.assign(p.fc_bias.size(), 0.0);
    return g;
}

void PredictorGrads::accumulate_scaled(const PredictorGrads& other, double scale) {
    auto add = [scale](std::vector<double>& dst, const std::vector<double>& src) {
        for (size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
    };
    for (int b = 0; b < 5; ++b) {
        add(kernel[b], other.kernel[b]);
        add(bias[b], other.bias[b]);
    }
    add(fc_kernel, other.fc_kernel);
    add(fc_bias, other.fc_bias);
}

ImageBuffer resize_bilinear(const ImageBuffer& image, int out_h, int out_w) {
    if (image.height < 1 || image.width < 1) throw std::runtime_error("empty image");
    if (image.height == out_h && image.width == out_w) return image;
    ImageBuffer out(out_h, out_w);
    const double sy = static_cast<double>(image.height) / out_h;
    const double sx = static_cast<double>(image.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        if (fy < 0) fy = 0;
        int y0 = static_cast<int>(fy);
        if (y0 > image.height - 2) y0 = image.height >= 2 ? image.height - 2 : 0;
        int y1 = std::min(y0 + 1, image.height - 1);
        const double ty = image.height >= 2 ? fy - y0 : 0.0;
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            if (fx < 0) fx = 0;
            int x0 = static_cast<int>(fx);
            if (x0 > image.width - 2) x0 = image.width >= 2 ? image.width - 2 : 0;
            int x1 = std::min(x0 + 1, image.width - 1);
            const double tx = image.width >= 2 ? fx - x0 : 0.0;
            for (int c = 0; c < 3; ++c) {
                const double a00 = image.at(y0, x0, c);
                const double a01 = image.at(y0, x1, c);
                const double a10 = image.at(y1, x0, c);
                const double a11 = image.at(y1, x1, c);
                const double top = a00 + tx * (a01 - a00);
                const double bot = a10 + tx * (a11 - a10);
                out.at(y, x, c) = static_cast<float>(top + ty * (bot - top));
            }
        }
    }
    return out;
}

FeatureMap conv2d_s2(const FeatureMap& input, const ConvBlockParams& params) {
    if (input.channels != params.in_channels) throw std::runtime_error("channel mismatch");
    if (input.height % 2 != 0 || input.width % 2 != 0)
        throw std::runtime_error("conv input dimensions must be even");
    const int oh = input.height / 2;
    const int ow = input.width / 2;
    FeatureMap out(params.out_channels, oh, ow);
    for (int oc = 0; oc < params.out_channels; ++oc) {
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                double acc = params.bias[oc];
                for (int ic = 0; ic < params.in_channels; ++ic) {
                    const double* k =
                        &params.kernel[(static_cast<size_t>(oc) * params.in_channels + ic) * 9];
                    for (int ky = 0; ky < 3; ++ky) {
                        const int iy = 2 * oy + ky - 1;
                        if (iy < 0 || iy >= input.height) continue;
                        for (int kx = 0; kx < 3; ++kx) {
                            const int ix = 2 * ox + kx - 1;
                            if (ix < 0 || ix >= input.width) continue;
                            acc += k[ky * 3 + kx] * input.at(ic, iy, ix);
                        }
                    }
                }
                out.at(oc, oy, ox) = acc;
            }
        }
    }
    return out;
}

void conv2d_s2_backward(const FeatureMap& input, const ConvBlockParams& params,
                        const FeatureMap& grad_out, std::span<double> grad_kernel,
                        std::span<double> grad_bias, FeatureMap& grad_input) {
    if (input.channels != params.in_channels) throw std::runtime_error("channel mismatch");
    grad_input = FeatureMap(input.channels, input.height, input.width);
    for (int oc = 0; oc < params.out_channels; ++oc) {
        for (int oy = 0; oy < grad_out.height; ++oy) {
            for (int ox = 0; ox < grad_out.width; ++ox) {
                const double go = grad_out.at(oc, oy, ox);
                grad_bias[oc] += go;
                for (int ic = 0; ic < params.in_channels; ++ic) {
                    const size_t kbase = (static_cast<size_t>(oc) * params.in_channels + ic) * 9;
                    const double* k = &params.kernel[kbase];
                    for (int ky = 0; ky < 3; ++ky) {
                        const int iy = 2 * oy + ky - 1;
                        if (iy < 0 || iy >= input.height) continue;
                        for (int kx = 0; kx < 3; ++kx) {
                            const int ix = 2 * ox + kx - 1;
                            if (ix < 0 || ix >= input.width) continue;
                            grad_kernel[kbase + ky * 3 + kx] += go * input.at(ic, iy, ix);
                            grad_input.at(ic, iy, ix) += go * k[ky * 3 + kx];
                        }
                    }
                }
            }
        }
    }
}

FeatureMap leaky_relu(const FeatureMap& x, double slope) {
    FeatureMap y = x;
    for (double& v : y.data)
        if (v < 0) v *= slope;
    return y;
}

FeatureMap leaky_relu_backward(const FeatureMap& x, const FeatureMap& grad_out, double slope) {
    FeatureMap gx = grad_out;
    for (size_t i = 0; i < gx.data.size(); ++i)
        if (x.data[i] < 0) gx.data[i] *= slope;
    return gx;
}

FeatureMap instance_norm(const FeatureMap& x, std::vector<double>& mean,
                         std::vector<double>& invstd) {
    const size_t n = static_cast<size_t>(x.height) * x.width;
    if (n < 2) throw std::runtime_error("instance norm needs at least 2 values per channel");
    mean.assign(x.channels, 0.0);
    invstd.assign(x.channels, 0.0);
    FeatureMap y(x.channels, x.height, x.width);
    for (int c = 0; c < x.channels; ++c) {
        const double* src = &x.data[static_cast<size_t>(c) * n];
        double mu = 0.0;
        for (size_t i = 0; i < n; ++i) mu += src[i];
        mu /= static_cast<double>(n);
        double var = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double d = src[i] - mu;
            var += d * d;
        }
        var /= static_cast<double>(n);
        const double inv = 1.0 / std::sqrt(var + kInstanceNormEps);
        mean[c] = mu;
        invstd[c] = inv;
        double* dst = &y.data[static_cast<size_t>(c) * n];
        for (size_t i = 0; i < n; ++i) dst[i] = (src[i] - mu) * inv;
    }
    return y;
}

FeatureMap instance_norm_backward(const FeatureMap& normed, const std::vector<double>& invstd,
                                  const FeatureMap& grad_out) {
    const size_t n = static_cast<size_t>(normed.height) * normed.width;
    FeatureMap gx(normed.channels, normed.height, normed.width);
    for (int c = 0; c < normed.channels; ++c) {
        const double* y = &normed.data[static_cast<size_t>(c) * n];
        const double* gy = &grad_out.data[static_cast<size_t>(c) * n];
        double sum_gy = 0.0, sum_gy_y = 0.0;
        for (size_t i = 0; i < n; ++i) {
            sum_gy += gy[i];
            sum_gy_y += gy[i] * y[i];
        }
        const double mean_gy = sum_gy / static_cast<double>(n);
        const double mean_gy_y = sum_gy_y / static_cast<double>(n);
        double* dst = &gx.data[static_cast<size_t>(c) * n];
        for (size_t i = 0; i < n; ++i)
            dst[i] = invstd[c] * (gy[i] - mean_gy - y[i] * mean_gy_y);
    }
    return gx;
}

std::vector<double> dropout_mask(size_t n, double rate, PredictorMode mode, std::mt19937_64& rng) {
    std::vector<double> mask(n, 1.0);
    if (mode == PredictorMode::Eval || rate <= 0.0) return mask;
    const double keep = 1.0 - rate;
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (double& m : mask) m = dist(rng) < keep ? 1.0 / keep : 0.0;
    return mask;
}

FusionWeights fc_head(const FeatureMap& x, const PredictorParams& params) {
    const int head_ch = PredictorParams::kChannelPlan[5];
    const int hs = PredictorParams::kHeadSpatial;
    if (x.channels != head_ch || x.height != hs || x.width != hs)
        throw std::runtime_error("fc head shape mismatch");
    FusionWeights out;
    out.w.resize(params.num_outputs);
    const size_t dim = x.data.size();
    for (int n = 0; n < params.num_outputs; ++n) {
        double acc = 0.0;
        const double* k = &params.fc_kernel[static_cast<size_t>(n) * dim];
        for (size_t i = 0; i < dim; ++i) acc += k[i] * x.data[i];
        out.w[n] = acc + params.fc_bias[n];
    }
    return out;
}

FusionWeights predictor_forward(const PredictorParams& params, const ImageBuffer& image,
                                PredictorMode mode, std::mt19937_64* dropout_rng,
                                PredictorActivations* saved) {
    const int s = PredictorParams::kInputSize;
    const ImageBuffer resized = resize_bilinear(image, s, s);
    FeatureMap x(3, s, s);
    for (int y = 0; y < s; ++y)
        for (int px = 0; px < s; ++px)
            for (int c = 0; c < 3; ++c) x.at(c, y, px) = resized.at(y, px, c);
    PredictorActivations local;
    PredictorActivations& acts = saved ? *saved : local;
    acts.input = x;
    FeatureMap cur = std::move(x);
    for (int b = 0; b < 5; ++b) {
        acts.conv_out[b] = conv2d_s2(cur, params.blocks[b]);
        acts.relu_out[b] = leaky_relu(acts.conv_out[b], params.blocks[b].negative_slope);
        acts.norm_out[b] = instance_norm(acts.relu_out[b], acts.mean[b], acts.invstd[b]);
        cur = acts.norm_out[b];
    }
    if (mode == PredictorMode::Train && !dropout_rng)
        throw std::runtime_error("train-mode forward needs a dropout rng");
    std::mt19937_64 unused;
    acts.dropout_mask =
        dropout_mask(cur.data.size(), params.dropout_rate, mode, dropout_rng ? *dropout_rng : unused);
    acts.head_input.resize(cur.data.size());
    for (size_t i = 0; i < cur.data.size(); ++i)
        acts.head_input[i] = cur.data[i] * acts.dropout_mask[i];
    FeatureMap head(cur.channels, cur.height, cur.width);
    head.data = acts.head_input;
    return fc_head(head, params);
}

void predictor_backward(const PredictorParams& params, const PredictorActivations& saved,
                        std::span<const double> upstream, PredictorGrads& grads) {
    if (static_cast<int>(upstream.size()) != params.num_outputs)
        throw std::runtime_error("upstream gradient size mismatch");
    const size_t dim = saved.head_input.size();
    // fc head
    std::vector<double> grad_head(dim, 0.0);
    for (int n = 0; n < params.num_outputs; ++n) {
        const double up = upstream[n];
        grads.fc_bias[n] += up;
        const double* k = &params.fc_kernel[static_cast<size_t>(n) * dim];
        double* gk = &grads.fc_kernel[static_cast<size_t>(n) * dim];
        for (size_t i = 0; i < dim; ++i) {
            gk[i] += up * saved.head_input[i];
            grad_head[i] += up * k[i];
        }
    }
    // dropout
    const FeatureMap& top = saved.norm_out[4];
    FeatureMap grad(top.channels, top.height, top.width);
    for (size_t i = 0; i < dim; ++i) grad.data[i] = grad_head[i] * saved.dropout_mask[i];
    // conv blocks, last to first
    for (int b = 4; b >= 0; --b) {
        grad = instance_norm_backward(saved.norm_out[b], saved.invstd[b], grad);
        grad = leaky_relu_backward(saved.conv_out[b], grad, params.blocks[b].negative_slope);
        const FeatureMap& below = b > 0 ? saved.norm_out[b - 1] : saved.input;
        FeatureMap grad_input;
        conv2d_s2_backward(below, params.blocks[b], grad, grads.kernel[b], grads.bias[b],
                           grad_input);
        grad = std::move(grad_input);
    }
}

}  // namespace lutforge
