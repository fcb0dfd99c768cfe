#include "lutforge/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lutforge {

namespace {

void check_dims(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.height != b.height || a.width != b.width)
        throw std::runtime_error("image dimension mismatch");
}

std::vector<double> luma(const ImageBuffer& img) {
    std::vector<double> out(img.pixel_count());
    for (size_t p = 0; p < out.size(); ++p) {
        out[p] = 0.299 * img.data[p * 3] + 0.587 * img.data[p * 3 + 1] +
                 0.114 * img.data[p * 3 + 2];
    }
    return out;
}

}  // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    check_dims(a, b);
    double mse = 0.0;
    const size_t n = a.value_count();
    for (size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(a.data[i]) - b.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(n);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
    check_dims(a, b);
    constexpr int kWin = 11;
    if (a.height < kWin || a.width < kWin) throw std::runtime_error("image too small for SSIM");
    constexpr double kSigma = 1.5;
    constexpr double kC1 = 0.01 * 0.01;
    constexpr double kC2 = 0.03 * 0.03;

    std::array<double, kWin> g;
    double gsum = 0.0;
    for (int i = 0; i < kWin; ++i) {
        const double d = i - (kWin - 1) / 2.0;
        g[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
        gsum += g[i];
    }
    for (double& v : g) v /= gsum;

    const std::vector<double> la = luma(a);
    const std::vector<double> lb = luma(b);
    const int w = a.width;

    double total = 0.0;
    size_t count = 0;
    for (int y = 0; y + kWin <= a.height; ++y) {
        for (int x = 0; x + kWin <= a.width; ++x) {
            double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
            for (int wy = 0; wy < kWin; ++wy) {
                for (int wx = 0; wx < kWin; ++wx) {
                    const double wgt = g[wy] * g[wx];
                    const double va = la[(y + wy) * w + (x + wx)];
                    const double vb = lb[(y + wy) * w + (x + wx)];
                    mu_a += wgt * va;
                    mu_b += wgt * vb;
                    aa += wgt * va * va;
                    bb += wgt * vb * vb;
                    ab += wgt * va * vb;
                }
            }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            const double num = (2 * mu_a * mu_b + kC1) * (2 * cov + kC2);
            const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

void srgb_to_lab(double r, double g, double b, double& L, double& A, double& B) {
    auto lin = [](double v) {
        return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
    };
    const double rl = lin(r), gl = lin(g), bl = lin(b);
    // sRGB D65 primaries
    const double X = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
    const double Y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
    const double Z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
    const double Xn = 0.95047, Yn = 1.0, Zn = 1.08883;
    auto f = [](double t) {
        constexpr double d = 6.0 / 29.0;
        return t > d * d * d ? std::cbrt(t) : t / (3 * d * d) + 4.0 / 29.0;
    };
    const double fx = f(X / Xn), fy = f(Y / Yn), fz = f(Z / Zn);
    L = 116.0 * fy - 16.0;
    A = 500.0 * (fx - fy);
    B = 200.0 * (fy - fz);
}

double delta_e(const ImageBuffer& a, const ImageBuffer& b) {
    check_dims(a, b);
    double total = 0.0;
    const size_t n = a.pixel_count();
    for (size_t p = 0; p < n; ++p) {
        double la, aa, ba, lb, ab, bb;
        srgb_to_lab(a.data[p * 3], a.data[p * 3 + 1], a.data[p * 3 + 2], la, aa, ba);
        srgb_to_lab(b.data[p * 3], b.data[p * 3 + 1], b.data[p * 3 + 2], lb, ab, bb);
        const double dl = la - lb, da = aa - ab, db = ba - bb;
        total += std::sqrt(dl * dl + da * da + db * db);
    }
    return total / static_cast<double>(n);
}

MetricReport evaluate(const ImageBuffer& a, const ImageBuffer& b) {
    return {psnr(a, b), ssim(a, b), delta_e(a, b)};
}

}  // namespace lutforge
