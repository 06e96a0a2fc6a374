#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "fasthymix/errors.hpp"
#include "fasthymix/metrics.hpp"
#include "support.hpp"

using namespace fasthymix;
using namespace fasthymix::testing;

namespace {

Eigen::MatrixXd test_image() {
    Eigen::MatrixXd img(32, 32);
    for (Index r = 0; r < 32; ++r) {
        for (Index c = 0; c < 32; ++c) img(r, c) = 0.5 + 0.3 * std::sin(0.3 * r) * std::cos(0.2 * c);
    }
    return img;
}

// SSIM with every window summed directly.
double reference_ssim(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double peak) {
    const double c1 = std::pow(0.01 * peak, 2), c2 = std::pow(0.03 * peak, 2);
    double total = 0.0;
    int count = 0;
    for (Index r = 0; r + 8 <= x.rows(); ++r) {
        for (Index c = 0; c + 8 <= x.cols(); ++c) {
            const Eigen::MatrixXd a = x.block(r, c, 8, 8), b = y.block(r, c, 8, 8);
            const double ma = a.mean(), mb = b.mean();
            const double va = (a.array() - ma).square().mean();
            const double vb = (b.array() - mb).square().mean();
            const double cov = ((a.array() - ma) * (b.array() - mb)).mean();
            total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    }
    return total / count;
}

}  // namespace

TEST(Psnr, Examples) {
    const Eigen::MatrixXd a = test_image();
    EXPECT_EQ(psnr(a, a), std::numeric_limits<double>::infinity());
    const Eigen::MatrixXd b = a.array() + 0.1;
    EXPECT_NEAR(psnr(a, b), 20.0, 1e-9);
    Eigen::MatrixXd c = a;
    for (Index i = 0; i < c.size(); ++i) c.data()[i] += (i % 2 ? 0.1 : -0.1);
    EXPECT_NEAR(psnr(a, c), 20.0, 1e-9);
    EXPECT_NEAR(psnr(a, b, 2.0), 20.0 + 20.0 * std::log10(2.0), 1e-9);
    EXPECT_THROW(psnr(a, Eigen::MatrixXd::Zero(3, 3)), ShapeError);
}

TEST(Psnr, DecreasesWithNoise) {
    Xoshiro256 rng(1);
    const Eigen::MatrixXd img = test_image();
    const Eigen::MatrixXd n = random_matrix(32, 32, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double s : {0.01, 0.02, 0.05, 0.1}) {
        const double v = psnr(img, img + s * n);
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(Ssim, IdentityNegativeAndMonotone) {
    const Eigen::MatrixXd img = test_image();
    EXPECT_NEAR(ssim(img, img), 1.0, 1e-12);
    Eigen::MatrixXd checker(32, 32);
    for (Index r = 0; r < 32; ++r) {
        for (Index c = 0; c < 32; ++c) checker(r, c) = (r + c) % 2 == 0 ? 0.4 : -0.4;
    }
    EXPECT_LT(ssim(checker, -checker), 0.0);
    Xoshiro256 rng(2);
    const Eigen::MatrixXd n = random_matrix(32, 32, rng);
    const double s1 = ssim(img, img + 0.01 * n);
    const double s2 = ssim(img, img + 0.05 * n);
    const double s3 = ssim(img, img + 0.1 * n);
    EXPECT_GT(s1, s2);
    EXPECT_GT(s2, s3);
    EXPECT_THROW(ssim(Eigen::MatrixXd::Zero(7, 9), Eigen::MatrixXd::Zero(7, 9)), ShapeError);
}

TEST(Ssim, MatchesDirectWindowSum) {
    Xoshiro256 rng(3);
    const Eigen::MatrixXd img = test_image();
    const Eigen::MatrixXd other = img + 0.07 * random_matrix(32, 32, rng);
    EXPECT_NEAR(ssim(img, other), reference_ssim(img, other, 1.0), 1e-10);
    EXPECT_NEAR(ssim(img, other, 2.0), reference_ssim(img, other, 2.0), 1e-10);
}

TEST(Sad, Examples) {
    const HsiCube a = random_cube(4, 4, 5, 1);
    EXPECT_NEAR(sad(a, a).mean_angle, 0.0, 1e-7);
    HsiCube twice(4, 4, Eigen::MatrixXd(2.0 * a.pixels_by_bands()));
    EXPECT_NEAR(sad(a, twice).mean_angle, 0.0, 1e-7);

    HsiCube x(1, 1, 2), y(1, 1, 2);
    x(0, 0, 0) = 1;
    y(0, 0, 1) = 3;
    EXPECT_NEAR(sad(x, y).mean_angle, std::numbers::pi / 2, 1e-15);
}

TEST(Sad, ExcludesZeroSpectraAndIsScaleInvariant) {
    Xoshiro256 rng(4);
    HsiCube a = random_cube(3, 3, 4, 2);
    const HsiCube b = random_cube(3, 3, 4, 3);
    a.pixels_by_bands().row(4).setZero();
    const SadResult r = sad(a, b);
    EXPECT_EQ(r.excluded, 1);
    double total = 0.0;
    for (Index p = 0; p < 9; ++p) {
        if (p == 4) continue;
        const Eigen::VectorXd u = a.pixels_by_bands().row(p), v = b.pixels_by_bands().row(p);
        total += std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
    }
    EXPECT_NEAR(r.mean_angle, total / 8.0, 1e-12);
    HsiCube scaled = b;
    for (Index p = 0; p < 9; ++p) scaled.pixels_by_bands().row(p) *= rng.uniform(0.1, 10.0);
    EXPECT_NEAR(sad(a, scaled).mean_angle, r.mean_angle, 1e-12);
}

TEST(MaskScores, Examples) {
    NoiseMask truth(4, 4, 3);
    truth.set(1, 0, false);
    truth.set(5, 2, false);
    const MaskScores same = mask_prf(truth, truth);
    EXPECT_EQ(same.precision, 1.0);
    EXPECT_EQ(same.recall, 1.0);
    EXPECT_EQ(same.f1, 1.0);

    const MaskScores none = mask_prf(NoiseMask(4, 4, 3), truth);
    EXPECT_EQ(none.precision, 0.0);
    EXPECT_EQ(none.recall, 0.0);
    EXPECT_EQ(none.f1, 0.0);

    NoiseMask est(4, 4, 3);
    est.set(1, 0, false);
    est.set(2, 0, false);
    const MaskScores half = mask_prf(est, truth);
    EXPECT_DOUBLE_EQ(half.precision, 0.5);
    EXPECT_DOUBLE_EQ(half.recall, 0.5);
    EXPECT_DOUBLE_EQ(half.f1, 0.5);
    EXPECT_THROW(mask_prf(NoiseMask(4, 4, 2), truth), ShapeError);
}

TEST(MaskScores, RandomEstimateMatchesDensity) {
    Xoshiro256 rng(5);
    const double density = 0.05;
    NoiseMask truth(100, 100, 10), est(100, 100, 10);
    for (Index b = 0; b < 10; ++b) {
        for (Index p = 0; p < 10000; ++p) {
            if (rng.uniform() < density) truth.set(p, b, false);
            if (rng.uniform() < density) est.set(p, b, false);
        }
    }
    EXPECT_NEAR(mask_prf(est, truth).f1, density, 0.01);
}

TEST(Evaluate, IdenticalCubes) {
    const HsiCube a = random_cube(10, 9, 4, 1);
    const MetricReport r = evaluate(a, a);
    EXPECT_EQ(r.infinite_psnr_bands, 4);
    EXPECT_EQ(r.mpsnr, std::numeric_limits<double>::infinity());
    EXPECT_NEAR(r.mssim, 1.0, 1e-12);
    EXPECT_NEAR(r.msad, 0.0, 1e-7);
}

TEST(Evaluate, MeansMatchPerBandOps) {
    Xoshiro256 rng(6);
    const HsiCube a = random_cube(12, 10, 5, 2);
    HsiCube b(12, 10, Eigen::MatrixXd(a.pixels_by_bands() + 0.1 * random_matrix(120, 5, rng)));
    b.pixels_by_bands().col(3) = a.pixels_by_bands().col(3);
    const MetricReport r = evaluate(a, b);
    double ps = 0.0, ss = 0.0;
    for (Index k = 0; k < 5; ++k) {
        EXPECT_EQ(r.psnr_per_band(k), psnr(a.band(k), b.band(k)));
        EXPECT_EQ(r.ssim_per_band(k), ssim(a.band(k), b.band(k)));
        if (k != 3) ps += r.psnr_per_band(k);
        ss += r.ssim_per_band(k);
    }
    EXPECT_EQ(r.infinite_psnr_bands, 1);
    EXPECT_NEAR(r.mpsnr, ps / 4.0, 1e-12);
    EXPECT_NEAR(r.mssim, ss / 5.0, 1e-12);
    EXPECT_NEAR(r.msad, sad(a, b).mean_angle, 1e-15);
    EXPECT_GE(r.msad, 0.0);
    EXPECT_LE(r.msad, std::numbers::pi);
}
