#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "lutforge/metrics.hpp"

using namespace lutforge;

namespace {

ImageBuffer constant_image(int h, int w, float r, float g, float b) {
    ImageBuffer img(h, w);
    for (size_t p = 0; p < img.pixel_count(); ++p) {
        img.data[p * 3] = r;
        img.data[p * 3 + 1] = g;
        img.data[p * 3 + 2] = b;
    }
    return img;
}

ImageBuffer random_image(int h, int w, std::mt19937_64& rng) {
    ImageBuffer img(h, w);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (float& v : img.data) v = static_cast<float>(dist(rng));
    return img;
}

// Plain-loop PSNR reference.
double ref_psnr(const ImageBuffer& a, const ImageBuffer& b) {
    double acc = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - b.data[i];
        acc += d * d;
    }
    return 10.0 * std::log10(a.data.size() / acc);
}

// SSIM reference with an explicitly materialized 2D window.
double ref_ssim(const ImageBuffer& ia, const ImageBuffer& ib) {
    const int h = ia.height, w = ia.width;
    std::vector<double> a(h * w), b(h * w);
    for (int p = 0; p < h * w; ++p) {
        a[p] = 0.299 * ia.data[p * 3] + 0.587 * ia.data[p * 3 + 1] + 0.114 * ia.data[p * 3 + 2];
        b[p] = 0.299 * ib.data[p * 3] + 0.587 * ib.data[p * 3 + 1] + 0.114 * ib.data[p * 3 + 2];
    }
    double win[11][11];
    double norm = 0;
    for (int y = 0; y < 11; ++y)
        for (int x = 0; x < 11; ++x) {
            const double dy = y - 5, dx = x - 5;
            win[y][x] = std::exp(-(dy * dy + dx * dx) / (2 * 1.5 * 1.5));
            norm += win[y][x];
        }
    for (auto& row : win)
        for (double& v : row) v /= norm;
    double total = 0;
    int count = 0;
    for (int y = 0; y + 11 <= h; ++y)
        for (int x = 0; x + 11 <= w; ++x) {
            double ma = 0, mb = 0, va = 0, vb = 0, cov = 0;
            for (int wy = 0; wy < 11; ++wy)
                for (int wx = 0; wx < 11; ++wx) {
                    ma += win[wy][wx] * a[(y + wy) * w + x + wx];
                    mb += win[wy][wx] * b[(y + wy) * w + x + wx];
                }
            for (int wy = 0; wy < 11; ++wy)
                for (int wx = 0; wx < 11; ++wx) {
                    const double da = a[(y + wy) * w + x + wx] - ma;
                    const double db = b[(y + wy) * w + x + wx] - mb;
                    va += win[wy][wx] * da * da;
                    vb += win[wy][wx] * db * db;
                    cov += win[wy][wx] * da * db;
                }
            const double c1 = 1e-4, c2 = 9e-4;
            total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                     ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return total / count;
}

}  // namespace

TEST_CASE("psnr: identical images are infinite") {
    std::mt19937_64 rng(1);
    const ImageBuffer a = random_image(8, 8, rng);
    CHECK(std::isinf(psnr(a, a)));
}

TEST_CASE("psnr: 0.1 constant offset gives 20 dB") {
    const ImageBuffer a = constant_image(16, 16, 0.5f, 0.5f, 0.5f);
    const ImageBuffer b = constant_image(16, 16, 0.6f, 0.6f, 0.6f);
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-5));
    CHECK_THROWS(psnr(a, constant_image(8, 8, 0, 0, 0)));
}

TEST_CASE("psnr: matches the reference on random pairs") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const ImageBuffer a = random_image(12, 17, rng);
        const ImageBuffer b = random_image(12, 17, rng);
        CHECK(std::abs(psnr(a, b) - ref_psnr(a, b)) < 1e-6);
    }
}

TEST_CASE("psnr decreases as noise amplitude grows") {
    std::mt19937_64 rng(3);
    const ImageBuffer clean = constant_image(16, 16, 0.5f, 0.5f, 0.5f);
    double prev = std::numeric_limits<double>::infinity();
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    std::mt19937_64 noise_rng(4);
    for (double amp : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        ImageBuffer noisy = clean;
        std::mt19937_64 fixed(5);  // same noise pattern, scaled
        for (float& v : noisy.data) v += static_cast<float>(amp * noise(fixed));
        const double p = psnr(clean, noisy);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("ssim: identical images give 1") {
    std::mt19937_64 rng(6);
    const ImageBuffer a = random_image(24, 24, rng);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ssim: inverted binary image is anti-correlated") {
    ImageBuffer a(16, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
            for (int c = 0; c < 3; ++c) a.at(y, x, c) = ((x / 2 + y / 2) % 2) ? 1.0f : 0.0f;
    ImageBuffer b = a;
    for (float& v : b.data) v = 1.0f - v;
    CHECK(ssim(a, b) < 0.0);
}

TEST_CASE("ssim: matches the reference implementation") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const ImageBuffer a = random_image(20, 26, rng);
        ImageBuffer b = a;
        std::uniform_real_distribution<double> noise(-0.1, 0.1);
        for (float& v : b.data) v = static_cast<float>(std::clamp(v + noise(rng), 0.0, 1.0));
        CHECK(std::abs(ssim(a, b) - ref_ssim(a, b)) < 1e-4);
    }
    CHECK_THROWS(ssim(constant_image(8, 8, 0, 0, 0), constant_image(8, 8, 0, 0, 0)));
}

TEST_CASE("delta_e: identical is 0, white vs black is 100") {
    const ImageBuffer white = constant_image(4, 4, 1, 1, 1);
    const ImageBuffer black = constant_image(4, 4, 0, 0, 0);
    CHECK(delta_e(white, white) == 0.0);
    CHECK(delta_e(white, black) == doctest::Approx(100.0).epsilon(1e-4));
}

TEST_CASE("srgb_to_lab: published reference values for the primaries") {
    double L, A, B;
    srgb_to_lab(1, 1, 1, L, A, B);
    CHECK(L == doctest::Approx(100.0).epsilon(1e-4));
    CHECK(std::abs(A) < 0.01);
    CHECK(std::abs(B) < 0.01);
    srgb_to_lab(1, 0, 0, L, A, B);
    CHECK(L == doctest::Approx(53.2408).epsilon(1e-3));
    CHECK(A == doctest::Approx(80.0925).epsilon(1e-3));
    CHECK(B == doctest::Approx(67.2032).epsilon(1e-3));
    srgb_to_lab(0, 1, 0, L, A, B);
    CHECK(L == doctest::Approx(87.7347).epsilon(1e-3));
    CHECK(A == doctest::Approx(-86.1827).epsilon(1e-3));
    CHECK(B == doctest::Approx(83.1793).epsilon(1e-3));
    srgb_to_lab(0, 0, 1, L, A, B);
    CHECK(L == doctest::Approx(32.2970).epsilon(1e-3));
    CHECK(A == doctest::Approx(79.1875).epsilon(1e-3));
    CHECK(B == doctest::Approx(-107.8602).epsilon(1e-3));
}

TEST_CASE("delta_e: continuity as perturbation shrinks") {
    std::mt19937_64 rng(8);
    const ImageBuffer a = random_image(8, 8, rng);
    double prev = 1e9;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
        ImageBuffer b = a;
        for (float& v : b.data) v = static_cast<float>(std::clamp(v + eps, 0.0, 1.0));
        const double d = delta_e(a, b);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("metrics are symmetric") {
    std::mt19937_64 rng(9);
    const ImageBuffer a = random_image(16, 16, rng);
    const ImageBuffer b = random_image(16, 16, rng);
    CHECK(psnr(a, b) == doctest::Approx(psnr(b, a)).epsilon(1e-12));
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-9));
    CHECK(delta_e(a, b) == doctest::Approx(delta_e(b, a)).epsilon(1e-12));
}
