#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lutforge/checkpoint.hpp"
#include "lutforge/cube_io.hpp"
#include "lutforge/image_io.hpp"
#include "lutforge/metrics.hpp"
#include "lutforge/model.hpp"
#include "lutforge/parallel.hpp"
#include "lutforge/trainer.hpp"

namespace {

using namespace lutforge;

std::vector<double> parse_weights(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw CLI::ValidationError("--fixed-weights", "no weights given");
    return out;
}

int cmd_train(const std::string& data, const std::string& out_dir, int epochs, double lr,
              int num_luts, int lattice, double lambda_s, double lambda_m, std::uint64_t seed,
              bool no_augment, int threads) {
    Dataset dataset = load_manifest(data);
    TrainConfig config;
    config.learning_rate = lr;
    config.num_luts = num_luts;
    config.lattice = lattice;
    config.lambda_s = lambda_s;
    config.lambda_m = lambda_m;
    config.epochs = epochs;
    config.seed = seed;
    config.augment = !no_augment;
    config.threads = threads;
    AdaptiveModel model = AdaptiveModel::init(num_luts, lattice, true, seed);
    TrainOptions options;
    options.out_dir = out_dir;
    options.record_steps = false;
    TrainResult result = train(model, dataset, config, options);
    std::filesystem::create_directories(out_dir);
    write_checkpoint(model, std::filesystem::path(out_dir) / "final.ckpt");
    if (!result.epochs.empty()) {
        const EpochStats& last = result.epochs.back();
        std::cout << "final epoch " << last.epoch << ": mse=" << last.mse << " r_s=" << last.r_s
                  << " r_m=" << last.r_m << " total=" << last.total << " psnr=" << last.psnr
                  << " dB\n";
    } else {
        std::cout << "wrote initial checkpoint (no training epochs requested)\n";
    }
    return 0;
}

int cmd_apply(const std::string& model_path, const std::string& input, const std::string& output,
              const std::string& fixed_weights, int threads, int bit_depth) {
    LoadedCheckpoint ckpt = read_checkpoint(model_path);
    ImageBuffer image = read_image(input);
    ImageBuffer result;
    if (!fixed_weights.empty()) {
        FusionWeights w{parse_weights(fixed_weights)};
        result = apply_adaptive(ckpt.model, image, w, threads);
    } else {
        result = apply_with_predictor(ckpt.model, image, threads);
    }
    result.clamp01();
    write_image(result, output, bit_depth);
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data, int threads) {
    LoadedCheckpoint ckpt = read_checkpoint(model_path);
    Dataset dataset = load_manifest(data);
    double sum_psnr = 0, sum_ssim = 0, sum_de = 0;
    for (const SamplePair& pair : dataset.pairs) {
        ImageBuffer out = apply_with_predictor(ckpt.model, pair.input, threads);
        out.clamp01();
        const MetricReport report = evaluate(out, pair.target);
        sum_psnr += report.psnr;
        sum_ssim += report.ssim;
        sum_de += report.delta_e;
    }
    const double n = static_cast<double>(dataset.pairs.size());
    std::cout << "samples: " << dataset.pairs.size() << "\n"
              << "mean PSNR:    " << sum_psnr / n << " dB\n"
              << "mean SSIM:    " << sum_ssim / n << "\n"
              << "mean delta E: " << sum_de / n << "\n";
    return 0;
}

int cmd_export_cube(const std::string& model_path, const std::string& output,
                    const std::string& weights_csv, const std::string& ref_image) {
    LoadedCheckpoint ckpt = read_checkpoint(model_path);
    FusionWeights w;
    if (!weights_csv.empty()) {
        w.w = parse_weights(weights_csv);
    } else if (!ref_image.empty()) {
        if (!ckpt.model.predictor)
            throw std::runtime_error("checkpoint has no predictor; use --weights");
        w = predictor_forward(*ckpt.model.predictor, read_image(ref_image), PredictorMode::Eval);
    } else {
        throw CLI::ValidationError("export-cube", "one of --weights or --image is required");
    }
    const Lut3D fused = fuse(ckpt.model.luts, w);
    write_cube(fused, output, "lutforge adaptive LUT");
    return 0;
}

int cmd_bench(int lattice, int width, int height, int threads) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Lut3D lut = Lut3D::identity(lattice);
    for (double& e : lut.entries) e += 0.01 * (dist(rng) - 0.5);
    ImageBuffer image(height, width);
    for (float& v : image.data) v = static_cast<float>(dist(rng));

    const int t = resolve_threads(threads);
    apply(lut, image, t);  // warm-up
    constexpr int kRuns = 5;
    double best_ms = 1e30;
    for (int run = 0; run < kRuns; ++run) {
        const auto start = std::chrono::steady_clock::now();
        ImageBuffer out = apply(lut, image, t);
        const auto stop = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
        best_ms = std::min(best_ms, ms);
    }
    const double mpix = static_cast<double>(width) * height / 1e6;
    std::cout << std::fixed << std::setprecision(2) << width << "x" << height << " lattice "
              << lattice << " threads " << t << ": " << best_ms << " ms/frame, "
              << mpix / (best_ms / 1000.0) << " Mpix/s\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"image-adaptive 3D LUT trainer and applier"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: LUTFORGE_THREADS or all cores)");

    auto* train_cmd = app.add_subcommand("train", "train a model on a paired dataset");
    std::string data, out_dir;
    int epochs = 40, num_luts = 3, lattice = 33;
    double lr = 1e-4, lambda_s = 1e-4, lambda_m = 10.0;
    std::uint64_t seed = 0x1a3d1u;
    bool no_augment = false;
    train_cmd->add_option("--data", data, "dataset manifest")->required();
    train_cmd->add_option("--out", out_dir, "output directory")->required();
    train_cmd->add_option("--epochs", epochs, "training epochs");
    train_cmd->add_option("--lr", lr, "learning rate");
    train_cmd->add_option("--luts", num_luts, "number of basis LUTs");
    train_cmd->add_option("--lattice", lattice, "lattice points per axis");
    train_cmd->add_option("--lambda-s", lambda_s, "smoothness weight");
    train_cmd->add_option("--lambda-m", lambda_m, "monotonicity weight");
    train_cmd->add_option("--seed", seed, "RNG seed");
    train_cmd->add_flag("--no-augment", no_augment, "disable data augmentation");

    auto* apply_cmd = app.add_subcommand("apply", "enhance one image with a trained model");
    std::string model_path, input, output, fixed_weights;
    int bit_depth = 8;
    apply_cmd->add_option("--model", model_path, "checkpoint path")->required();
    apply_cmd->add_option("--input", input, "input image")->required();
    apply_cmd->add_option("--output", output, "output image")->required();
    apply_cmd->add_option("--fixed-weights", fixed_weights,
                          "comma-separated fusion weights (bypasses the predictor)");
    apply_cmd->add_option("--bit-depth", bit_depth, "output bit depth (8 or 16)");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on a paired dataset");
    std::string eval_model, eval_data;
    eval_cmd->add_option("--model", eval_model, "checkpoint path")->required();
    eval_cmd->add_option("--data", eval_data, "dataset manifest")->required();

    auto* export_cmd = app.add_subcommand("export-cube", "materialize the adaptive LUT as .cube");
    std::string export_model, export_out, export_weights, export_image;
    export_cmd->add_option("--model", export_model, "checkpoint path")->required();
    export_cmd->add_option("--output", export_out, "output .cube path")->required();
    export_cmd->add_option("--weights", export_weights, "comma-separated fusion weights");
    export_cmd->add_option("--image", export_image, "reference image for predicted weights");

    auto* bench_cmd = app.add_subcommand("bench", "measure apply throughput");
    int bench_lattice = 33, bench_w = 3840, bench_h = 2160;
    bench_cmd->add_option("--lattice", bench_lattice, "lattice points per axis");
    bench_cmd->add_option("--width", bench_w, "image width");
    bench_cmd->add_option("--height", bench_h, "image height");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd)
            return cmd_train(data, out_dir, epochs, lr, num_luts, lattice, lambda_s, lambda_m,
                             seed, no_augment, threads);
        if (*apply_cmd)
            return cmd_apply(model_path, input, output, fixed_weights, threads, bit_depth);
        if (*eval_cmd) return cmd_eval(eval_model, eval_data, threads);
        if (*export_cmd)
            return cmd_export_cube(export_model, export_out, export_weights, export_image);
        if (*bench_cmd) return cmd_bench(bench_lattice, bench_w, bench_h, threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
