#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fasthymix/denoiser.hpp"
#include "fasthymix/hsi_cube.hpp"
#include "fasthymix/noise_mask.hpp"
#include "fasthymix/noise_model.hpp"
#include "fasthymix/subspace.hpp"

namespace fasthymix {

/// Band b scaled by 1 / sigma_b. NumericalError if any sigma_b <= 0.
HsiCube whiten(const HsiCube& cube, const NoiseStats& stats);

/// Band b scaled by sigma_b.
HsiCube unwhiten(const HsiCube& cube, const NoiseStats& stats);

/// Pixels whose mask is one in every band. Below `min_pixels` the rule is
/// relaxed to pixels with at least 95% clean bands, then to all pixels;
/// each relaxation appends a message to `warnings` when given.
std::vector<Index> select_clean_pixels(const NoiseMask& mask, Index min_pixels,
                                       std::vector<std::string>* warnings = nullptr);

/// Tikhonov term added to the masked Gram matrix.
inline constexpr double kMaskedRidge = 1e-8;

/// Least-squares subspace coefficients of a pixel from its clean bands.
///
/// Solves (E^T diag(m) E + delta I) z = E^T (m .* y) with one refinement
/// step against the unregularized system. With fewer clean bands than the
/// subspace dimension, masked bands are imputed from `fill` and the pixel
/// is projected as a whole: z = E^T (m .* y + (1 - m) .* fill). An empty
/// `fill` imputes zeros.
class MaskedProjector {
public:
    MaskedProjector(const SubspaceBasis& basis, Eigen::VectorXd fill = {});

    Eigen::VectorXd project(const Eigen::Ref<const Eigen::VectorXd>& y,
                            std::span<const std::uint8_t> mask) const;

private:
    Eigen::MatrixXd basis_;
    Eigen::MatrixXd full_gram_;
    Eigen::VectorXd fill_;
};

Eigen::VectorXd masked_projection(const Eigen::Ref<const Eigen::VectorXd>& y,
                                  std::span<const std::uint8_t> mask, const SubspaceBasis& basis,
                                  const Eigen::VectorXd& fill = {});

/// Replaces every pixel by E * masked_projection(pixel), so sparse-noise
/// elements are re-estimated from the clean bands.
HsiCube restore_sparse(const HsiCube& whitened, const NoiseMask& mask, const SubspaceBasis& basis,
                       const Eigen::VectorXd& fill = {}, int threads = 1);

/// Projects onto the subspace (restored x_3 E^T) and denoises each of the
/// resulting P eigen-images with noise std 1. Returns the r x c x P cube of
/// denoised coefficients.
HsiCube denoise_eigen_images(const HsiCube& restored, const SubspaceBasis& basis,
                             const Denoiser& denoiser, int threads = 1);

struct PipelineConfig {
    std::optional<Index> subspace_dim;  ///< nullopt selects the dimension automatically
    DenoiserSpec denoiser;
    std::uint64_t em_seed = 0;
    /// Minimum clean-pixel count before relaxing the selection; default
    /// 50 * P for an explicit P and 2 * B for automatic selection.
    std::optional<Index> min_clean_pixels;
    int threads = 1;
    /// Overrides `denoiser` when set.
    Denoiser custom_denoiser;
};

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

struct RunReport {
    std::vector<StageTiming> stages;
    Eigen::VectorXd sigma_per_band;
    double mask_zero_fraction = 0.0;
    Index subspace_dim = 0;
    Index clean_pixels = 0;
    std::vector<std::string> warnings;
};

struct PipelineResult {
    HsiCube denoised;
    RunReport report;
    NoiseEstimate noise;
};

/// Full mixed-noise removal: noise estimation, whitening, clean-pixel
/// subspace learning, masked least-squares restoration of sparse-noise
/// elements, eigen-image denoising, reconstruction and inverse whitening.
/// Stage failures surface as StageError naming the stage.
PipelineResult denoise(const HsiCube& cube, const PipelineConfig& config = {});

}  // namespace fasthymix
