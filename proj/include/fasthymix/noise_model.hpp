#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fasthymix/gmm.hpp"
#include "fasthymix/hsi_cube.hpp"
#include "fasthymix/noise_mask.hpp"

namespace fasthymix {

/// Per-band regression residuals, pixels x bands (column b is xi_b).
struct CoarseNoise {
    Eigen::MatrixXd residuals;
};

/// Relative ridge added to the Gram submatrix diagonal, scaled by its mean
/// diagonal entry.
inline constexpr double kRegressionRidge = 1e-10;

/// Residual of regressing band b on all remaining bands.
///
/// `pixels_by_bands` is the transposed mode-3 unfolding. The regression
/// uses the ridge-stabilized normal equations followed by one refinement
/// step against the unregularized system, so well-posed problems are
/// solved to working precision. Throws NumericalError naming the band if
/// the system cannot be factored.
Eigen::VectorXd coarse_noise_band(const Eigen::MatrixXd& pixels_by_bands, Index band);

/// coarse_noise_band for every band, sharing one B x B Gram matrix.
CoarseNoise coarse_noise(const HsiCube& cube, int threads = 1);

/// m3 / m2^(3/2) with population central moments. DegenerateInputError on
/// zero variance or fewer than two samples.
double skewness(std::span<const double> v);

/// m4 / m2^2 (raw kurtosis: 3 for a Gaussian).
double kurtosis(std::span<const double> v);

inline constexpr double kSkewnessLimit = 3.0;
inline constexpr double kKurtosisLimit = 10.0;

/// Normality gate: |skewness| < 3 and |kurtosis| < 10.
bool is_gaussian(std::span<const double> xi);

/// Per-band Gaussian noise standard deviations; C = diag(sigma^2).
struct NoiseStats {
    Eigen::VectorXd sigma;

    Index bands() const { return sigma.size(); }
    Eigen::VectorXd covariance_diagonal() const { return sigma.array().square(); }
};

struct BandNoiseReport {
    double sigma = 0.0;
    bool gaussian_gate = false;
    std::optional<GmmParams> gmm;
    bool fallback_used = false;
};

struct NoiseEstimate {
    NoiseStats stats;
    NoiseMask mask;
    std::vector<BandNoiseReport> bands;
    std::vector<std::string> warnings;
};

struct NoiseOptions {
    std::uint64_t em_seed = 0;
    int threads = 1;
};

/// Estimates the Gaussian noise level of every band and which elements
/// carry sparse noise.
///
/// Bands whose residual passes the normality gate are all-Gaussian. Other
/// bands get a two-component mixture fit; the component with the larger
/// proportion is the Gaussian group, whose residual std is sigma_b and
/// whose members are the mask ones. Residuals at or below the floor
/// 1e-6 * range(cube) are treated as noiseless and sigma_b is floored. If
/// EM fails, sigma_b = 1.4826 * MAD and elements with |xi| > 4 sigma_b are
/// masked, with a warning.
NoiseEstimate estimate_noise(const HsiCube& cube, const NoiseOptions& options = {});

}  // namespace fasthymix
