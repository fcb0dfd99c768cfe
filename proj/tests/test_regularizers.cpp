#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "lutforge/regularizers.hpp"

using namespace lutforge;

namespace {

Lut3D random_lut(int m, std::mt19937_64& rng) {
    Lut3D lut(m);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (double& e : lut.entries) e = dist(rng);
    return lut;
}

// Brute-force pair scan, independent of the production accumulation.
double oracle_mono(const Lut3D& lut) {
    double total = 0;
    const int m = lut.size;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) {
                    if (i + 1 < m)
                        total += std::max(0.0, lut.at(c, i, j, k) - lut.at(c, i + 1, j, k));
                    if (j + 1 < m)
                        total += std::max(0.0, lut.at(c, i, j, k) - lut.at(c, i, j + 1, k));
                    if (k + 1 < m)
                        total += std::max(0.0, lut.at(c, i, j, k) - lut.at(c, i, j, k + 1));
                }
    return total;
}

}  // namespace

TEST_CASE("tv_loss: constant LUT is zero") {
    Lut3D flat(9);
    for (double& e : flat.entries) e = 0.77;
    CHECK(tv_loss(flat) == 0.0);
}

TEST_CASE("tv_loss: identity closed form at M=33") {
    // each channel varies only along its own axis, step s = 1/32:
    // 3 channels * (M-1) steps * M^2 lines * s^2
    const Lut3D id = Lut3D::identity(33);
    CHECK(tv_loss(id) == doctest::Approx(102.09375).epsilon(1e-9));
    CHECK(tv_loss(Lut3D::identity(5)) == doctest::Approx(3.0 * 4 * 25 / 16.0).epsilon(1e-12));
}

TEST_CASE("tv_loss: invariant to a per-channel constant shift") {
    std::mt19937_64 rng(1);
    Lut3D lut = random_lut(5, rng);
    const double before = tv_loss(lut);
    for (int i = 0; i < 5 * 5 * 5; ++i) lut.entries[i] += 0.37;  // red channel only
    CHECK(tv_loss(lut) == doctest::Approx(before).epsilon(1e-9));
}

TEST_CASE("tv_loss: gradient matches finite differences") {
    std::mt19937_64 rng(2);
    Lut3D lut = random_lut(4, rng);
    std::vector<double> grad(lut.entries.size(), 0.0);
    tv_loss_grad(lut, 1.0, grad);
    const double h = 1e-6;
    for (size_t e = 0; e < lut.entries.size(); e += 3) {
        const double saved = lut.entries[e];
        lut.entries[e] = saved + h;
        const double lp = tv_loss(lut);
        lut.entries[e] = saved - h;
        const double lm = tv_loss(lut);
        lut.entries[e] = saved;
        const double fd = (lp - lm) / (2 * h);
        CHECK(std::abs(grad[e] - fd) / std::max(1e-6, std::abs(fd)) < 1e-3);
    }
}

TEST_CASE("weight_l2") {
    CHECK(weight_l2({{0, 0, 0}}) == 0.0);
    CHECK(weight_l2({{1, 1, 1}}) == 3.0);
    CHECK(weight_l2({{-2, 0.5}}) == doctest::Approx(4.25));
}

TEST_CASE("smooth_reg composes tv and weight terms") {
    const int n = 3;
    std::vector<Lut3D> ids(n, Lut3D::identity(33));
    const FusionWeights w{{1, 0, 0}};
    CHECK(smooth_reg(ids, w) == doctest::Approx(102.09375 * n + 1.0).epsilon(1e-9));

    std::vector<Lut3D> zeros(2, Lut3D::zeros(5));
    CHECK(smooth_reg(zeros, {{0, 0}}) == 0.0);

    std::mt19937_64 rng(3);
    std::vector<Lut3D> luts{random_lut(4, rng), random_lut(4, rng)};
    const FusionWeights rw{{0.3, -1.2}};
    CHECK(smooth_reg(luts, rw) == tv_loss(luts[0]) + tv_loss(luts[1]) + weight_l2(rw));
}

TEST_CASE("monotonicity_loss: identity and constant LUTs are zero") {
    CHECK(monotonicity_loss(Lut3D::identity(33)) == 0.0);
    Lut3D flat(7);
    for (double& e : flat.entries) e = 0.4;
    CHECK(monotonicity_loss(flat) == 0.0);
}

TEST_CASE("monotonicity_loss: a single raised entry, against the pair-scan oracle") {
    Lut3D lut = Lut3D::identity(9);
    lut.at(0, 5, 5, 5) += 0.1;
    // r is constant along j and k, so the raise (smaller than the lattice
    // step) violates exactly the two outgoing pairs in those directions
    CHECK(monotonicity_loss(lut) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(monotonicity_loss(lut) == doctest::Approx(oracle_mono(lut)).epsilon(1e-12));

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const Lut3D r = random_lut(5, rng);
        CHECK(monotonicity_loss(r) == doctest::Approx(oracle_mono(r)).epsilon(1e-12));
    }
}

TEST_CASE("monotonicity_loss is zero iff entries are axis-monotone (M=3 sample)") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        Lut3D lut(3);
        for (double& e : lut.entries) e = dist(rng);
        bool monotone = true;
        for (int c = 0; c < 3 && monotone; ++c)
            for (int i = 0; i < 3 && monotone; ++i)
                for (int j = 0; j < 3 && monotone; ++j)
                    for (int k = 0; k < 3 && monotone; ++k) {
                        if (i + 1 < 3 && lut.at(c, i, j, k) > lut.at(c, i + 1, j, k))
                            monotone = false;
                        if (j + 1 < 3 && lut.at(c, i, j, k) > lut.at(c, i, j + 1, k))
                            monotone = false;
                        if (k + 1 < 3 && lut.at(c, i, j, k) > lut.at(c, i, j, k + 1))
                            monotone = false;
                    }
        CHECK((monotonicity_loss(lut) == 0.0) == monotone);
    }
}

TEST_CASE("monotonicity gradient matches finite differences away from kinks") {
    std::mt19937_64 rng(6);
    const Lut3D lut = random_lut(4, rng);
    std::vector<double> grad(lut.entries.size(), 0.0);
    monotonicity_grad(lut, 1.0, grad);
    const double h = 1e-8;  // small enough not to flip any pair's sign
    Lut3D probe = lut;
    for (size_t e = 0; e < lut.entries.size(); e += 5) {
        const double saved = probe.entries[e];
        probe.entries[e] = saved + h;
        const double lp = monotonicity_loss(probe);
        probe.entries[e] = saved - h;
        const double lm = monotonicity_loss(probe);
        probe.entries[e] = saved;
        const double fd = (lp - lm) / (2 * h);
        CHECK(std::abs(grad[e] - fd) < 1e-3 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("both regularizers are nonnegative") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Lut3D lut = random_lut(4, rng);
        CHECK(tv_loss(lut) >= 0.0);
        CHECK(monotonicity_loss(lut) >= 0.0);
    }
}
