#include "lutforge/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lutforge/checkpoint.hpp"
#include "lutforge/image_io.hpp"
#include "lutforge/regularizers.hpp"

namespace lutforge {

double mse_loss(const ImageBuffer& output, const ImageBuffer& target) {
    if (output.height != target.height || output.width != target.width)
        throw std::runtime_error("image dimension mismatch");
    double acc = 0.0;
    const size_t n = output.value_count();
    for (size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(output.data[i]) - target.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(n);
}

ImageBuffer flip_horizontal(const ImageBuffer& image) {
    ImageBuffer out(image.height, image.width);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = image.at(y, image.width - 1 - x, c);
    return out;
}

namespace {

ImageBuffer crop(const ImageBuffer& image, int y0, int x0, int h, int w) {
    ImageBuffer out(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = image.at(y0 + y, x0 + x, c);
    return out;
}

}  // namespace

SamplePair augment(const SamplePair& pair, std::mt19937_64& rng) {
    if (pair.input.height != pair.target.height || pair.input.width != pair.target.width)
        throw std::runtime_error("sample pair dimension mismatch");
    const int h = pair.input.height;
    const int w = pair.input.width;

    // draw order: scale, y0, x0, flip, brightness, saturation
    std::uniform_real_distribution<double> scale_dist(0.6, 1.0);
    int ch = 0, cw = 0;
    for (;;) {
        const double scale = scale_dist(rng);
        ch = std::max(1, static_cast<int>(std::lround(scale * h)));
        cw = std::max(1, static_cast<int>(std::lround(scale * w)));
        if (ch <= h && cw <= w) break;  // rounding guard; re-draw otherwise
    }
    std::uniform_int_distribution<int> ydist(0, h - ch);
    std::uniform_int_distribution<int> xdist(0, w - cw);
    const int y0 = ydist(rng);
    const int x0 = xdist(rng);
    SamplePair out;
    out.input = crop(pair.input, y0, x0, ch, cw);
    out.target = crop(pair.target, y0, x0, ch, cw);

    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < 0.5) {
        out.input = flip_horizontal(out.input);
        out.target = flip_horizontal(out.target);
    }

    std::uniform_real_distribution<double> jitter(0.8, 1.2);
    const double brightness = jitter(rng);
    const double saturation = jitter(rng);
    for (size_t p = 0; p < out.input.pixel_count(); ++p) {
        float* px = &out.input.data[p * 3];
        const double gray = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
        for (int c = 0; c < 3; ++c) {
            const double v = brightness * (gray + saturation * (px[c] - gray));
            px[c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

LossBreakdown train_step(AdaptiveModel& model, const SamplePair& pair, const TrainConfig& config,
                         AdamState& adam, std::mt19937_64& dropout_rng) {
    const int n_luts = model.lut_count();

    // forward: weights -> fused LUT -> transformed image
    FusionWeights weights;
    PredictorActivations acts;
    const bool use_predictor = !config.fixed_weights.has_value();
    if (use_predictor) {
        if (!model.predictor) throw std::runtime_error("model has no weight predictor");
        weights = predictor_forward(*model.predictor, pair.input, PredictorMode::Train,
                                    &dropout_rng, &acts);
    } else {
        weights.w = *config.fixed_weights;
        if (static_cast<int>(weights.w.size()) != n_luts)
            throw std::runtime_error("fixed weight count mismatch");
    }
    const Lut3D fused = fuse(model.luts, weights);
    const ImageBuffer output = apply(fused, pair.input, config.threads);

    LossBreakdown loss;
    loss.mse = mse_loss(output, pair.target);
    loss.r_s = smooth_reg(model.luts, weights);
    for (const Lut3D& lut : model.luts) loss.r_m += monotonicity_loss(lut);
    loss.total = loss.mse + config.lambda_s * loss.r_s + config.lambda_m * loss.r_m;
    if (!std::isfinite(loss.total)) throw std::runtime_error("divergence");

    // backward: per-pixel MSE gradient into the fused-LUT entry gradient
    std::vector<double> fused_grad(fused.entries.size(), 0.0);
    const double inv_count = 1.0 / static_cast<double>(output.value_count());
    for (size_t p = 0; p < output.pixel_count(); ++p) {
        const float* in = &pair.input.data[p * 3];
        const float* out = &output.data[p * 3];
        const float* tgt = &pair.target.data[p * 3];
        Rgb up;
        for (int c = 0; c < 3; ++c)
            up[c] = 2.0 * (static_cast<double>(out[c]) - tgt[c]) * inv_count;
        trilinear_backward(fused, Rgb{in[0], in[1], in[2]}, up, fused_grad);
    }

    // split into basis-LUT gradients (dV_fused/dV_n = w_n) plus regularizers
    std::vector<std::vector<double>> lut_grads(n_luts);
    for (int n = 0; n < n_luts; ++n) {
        lut_grads[n].resize(fused_grad.size());
        const double w = weights.w[n];
        for (size_t e = 0; e < fused_grad.size(); ++e) lut_grads[n][e] = w * fused_grad[e];
        tv_loss_grad(model.luts[n], config.lambda_s, lut_grads[n]);
        monotonicity_grad(model.luts[n], config.lambda_m, lut_grads[n]);
    }

    // fusion weight gradients feed the predictor backward pass
    std::vector<double> weight_grads = fusion_weight_gradient(model.luts, fused_grad);
    for (int n = 0; n < n_luts; ++n) weight_grads[n] += config.lambda_s * 2.0 * weights.w[n];

    PredictorGrads pred_grads;
    if (use_predictor) {
        pred_grads = PredictorGrads::zeros_like(*model.predictor);
        predictor_backward(*model.predictor, acts, weight_grads, pred_grads);
    }

    // Adam update in serialization order: luts, then predictor tensors
    adam.step += 1;
    const AdamConfig acfg = config.adam();
    auto tensors = parameter_tensors(model);
    size_t ti = 0;
    for (int n = 0; n < n_luts; ++n, ++ti)
        adam_update(tensors[ti], lut_grads[n], adam.m[ti], adam.v[ti], adam.step, acfg);
    if (model.predictor) {
        if (use_predictor) {
            for (int b = 0; b < 5; ++b) {
                adam_update(tensors[ti], pred_grads.kernel[b], adam.m[ti], adam.v[ti], adam.step,
                            acfg);
                ++ti;
                adam_update(tensors[ti], pred_grads.bias[b], adam.m[ti], adam.v[ti], adam.step,
                            acfg);
                ++ti;
            }
            adam_update(tensors[ti], pred_grads.fc_kernel, adam.m[ti], adam.v[ti], adam.step, acfg);
            ++ti;
            adam_update(tensors[ti], pred_grads.fc_bias, adam.m[ti], adam.v[ti], adam.step, acfg);
            ++ti;
        }
        // with pinned weights the predictor tensors receive no update
    }
    return loss;
}

Dataset load_manifest(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw std::runtime_error(manifest.string() + ": cannot open manifest");
    const auto base = manifest.parent_path();
    Dataset dataset;
    std::string line;
    int lineno = 0;
    int listed = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error(manifest.string() + ":" + std::to_string(lineno) +
                                     ": expected input<TAB>target");
        ++listed;
        const std::filesystem::path in_path = base / line.substr(0, tab);
        const std::filesystem::path tgt_path = base / line.substr(tab + 1);
        try {
            SamplePair pair;
            pair.input = read_image(in_path);
            pair.target = read_image(tgt_path);
            if (pair.input.height != pair.target.height || pair.input.width != pair.target.width)
                throw std::runtime_error("input/target dimension mismatch");
            dataset.pairs.push_back(std::move(pair));
        } catch (const std::exception& e) {
            std::cerr << "warning: skipping sample at line " << lineno << ": " << e.what() << "\n";
        }
    }
    if (listed == 0) throw std::runtime_error(manifest.string() + ": empty manifest");
    if (dataset.pairs.empty())
        throw std::runtime_error(manifest.string() + ": no readable samples");
    return dataset;
}

TrainResult train(AdaptiveModel& model, const Dataset& dataset, const TrainConfig& config,
                  const TrainOptions& options) {
    if (dataset.pairs.empty()) throw std::runtime_error("empty dataset");
    AdamState adam = AdamState::for_model(model);
    std::mt19937_64 shuffle_rng(config.seed);
    std::mt19937_64 aug_rng(config.seed ^ 0xa5a5a5a5a5a5a5a5ull);
    std::mt19937_64 dropout_rng(config.seed ^ 0x5a5a5a5a5a5a5a5aull);

    TrainResult result;
    std::ofstream csv;
    if (options.out_dir) {
        std::filesystem::create_directories(*options.out_dir);
        csv.open(*options.out_dir / "metrics.csv");
        csv << "epoch,step,mse,r_s,r_m,total,psnr\n";
    }
    double best_psnr = -std::numeric_limits<double>::infinity();
    long step = 0;
    std::vector<size_t> order(dataset.pairs.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        EpochStats stats;
        stats.epoch = epoch;
        for (size_t idx : order) {
            const SamplePair& raw = dataset.pairs[idx];
            const SamplePair sample = config.augment ? augment(raw, aug_rng) : raw;
            const LossBreakdown loss = train_step(model, sample, config, adam, dropout_rng);
            ++step;
            const double step_psnr =
                loss.mse > 0 ? 10.0 * std::log10(1.0 / loss.mse) : 99.0;
            if (options.record_steps)
                result.steps.push_back(
                    {epoch, step, loss.mse, loss.r_s, loss.r_m, loss.total, step_psnr});
            if (csv.is_open())
                csv << epoch << "," << step << "," << loss.mse << "," << loss.r_s << ","
                    << loss.r_m << "," << loss.total << "," << step_psnr << "\n";
            stats.mse += loss.mse;
            stats.r_s += loss.r_s;
            stats.r_m += loss.r_m;
            stats.total += loss.total;
            stats.psnr += step_psnr;
        }
        const double inv = 1.0 / static_cast<double>(order.size());
        stats.mse *= inv;
        stats.r_s *= inv;
        stats.r_m *= inv;
        stats.total *= inv;
        stats.psnr *= inv;
        result.epochs.push_back(stats);
        if (options.out_dir) {
            write_checkpoint(model, *options.out_dir / "checkpoint.ckpt", &adam);
            if (stats.psnr > best_psnr) {
                best_psnr = stats.psnr;
                write_checkpoint(model, *options.out_dir / "best.ckpt");
            }
        }
    }
    return result;
}

}  // namespace lutforge
