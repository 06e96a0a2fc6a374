#pragma once

#include <functional>
#include <map>
#include <string>

#include <Eigen/Dense>

namespace fasthymix {

/// Single-band Gaussian denoiser: (image, noise std) -> denoised image of
/// the same shape. Must be deterministic.
using Denoiser = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&, double)>;

/// Named denoiser with scalar parameters, resolved by make_denoiser.
///
/// Built-in names:
///   "identity"  returns its input.
///   "dct"       overlapping block DCT hard thresholding; parameters
///               "threshold" (multiple of sigma, default 2.7), "block"
///               (default 8), "stride" (default 4).
struct DenoiserSpec {
    std::string name = "dct";
    std::map<std::string, double> parameters;
};

/// ConfigError for an unknown name or parameter.
Denoiser make_denoiser(const DenoiserSpec& setup);

inline constexpr double kDctThreshold = 2.7;
inline constexpr int kDctBlock = 8;
inline constexpr int kDctStride = 4;

/// Sliding-window DCT denoiser.
///
/// Every block x block window on a stride grid (plus the last window
/// flush with each border) is transformed with an orthonormal 2-D DCT-II;
/// non-DC coefficients with |c| < threshold * sigma are zeroed, the window
/// is inverted and the windows are averaged with uniform weights. An image
/// smaller than a block in either dimension is zero padded up to one block
/// and cropped back. sigma == 0 returns the input unchanged.
Eigen::MatrixXd dct_denoise(const Eigen::MatrixXd& img, double sigma,
                            double threshold = kDctThreshold, int block = kDctBlock,
                            int stride = kDctStride);

}  // namespace fasthymix
