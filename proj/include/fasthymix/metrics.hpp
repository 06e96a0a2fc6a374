#pragma once

#include <limits>
#include <optional>

#include "fasthymix/hsi_cube.hpp"
#include "fasthymix/noise_mask.hpp"

namespace fasthymix {

/// 10 log10(peak^2 / MSE). Identical images give +infinity.
double psnr(const Eigen::Ref<const Eigen::MatrixXd>& reference,
            const Eigen::Ref<const Eigen::MatrixXd>& test, double peak = 1.0);

inline constexpr int kSsimWindow = 8;

/// Mean single-scale SSIM over all 8x8 windows (stride 1, uniform weights),
/// C1 = (0.01 peak)^2, C2 = (0.03 peak)^2. ShapeError for images smaller
/// than one window.
double ssim(const Eigen::Ref<const Eigen::MatrixXd>& reference,
            const Eigen::Ref<const Eigen::MatrixXd>& test, double peak = 1.0);

struct SadResult {
    double mean_angle = 0.0;  ///< radians, over pixels with nonzero spectra in both cubes
    Index excluded = 0;       ///< pixels skipped for a zero-norm spectrum
};

/// Mean spectral angle between corresponding pixel spectra.
SadResult sad(const HsiCube& reference, const HsiCube& test);

struct MaskScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Detection scores with zeros (sparse-noise elements) as positives.
/// Undefined ratios are reported as 0.
MaskScores mask_prf(const NoiseMask& estimate, const NoiseMask& truth);

struct MetricReport {
    Eigen::VectorXd psnr_per_band;  ///< +infinity for exact bands
    Eigen::VectorXd ssim_per_band;
    double mpsnr = std::numeric_limits<double>::infinity();  ///< mean of finite band PSNRs
    Index infinite_psnr_bands = 0;
    double mssim = 0.0;
    double msad = 0.0;
    Index sad_excluded_pixels = 0;
    std::optional<MaskScores> mask;
};

MetricReport evaluate(const HsiCube& reference, const HsiCube& test, double peak = 1.0);

}  // namespace fasthymix
