#include "fasthymix/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "fasthymix/errors.hpp"
#include "fasthymix/parallel.hpp"
#include "fasthymix/stats.hpp"

namespace fasthymix {

namespace {

constexpr double kRelaxedCleanFraction = 0.95;
constexpr Index kCleanPixelsPerDim = 50;

void check_stats(const HsiCube& cube, const NoiseStats& stats) {
    if (stats.bands() != cube.bands()) {
        throw ShapeError("noise statistics cover " + std::to_string(stats.bands()) +
                         " bands, cube has " + std::to_string(cube.bands()));
    }
    if (!(stats.sigma.array() > 0.0).all() || !stats.sigma.allFinite()) {
        throw NumericalError("noise standard deviations must be positive and finite");
    }
}

HsiCube scale_bands(const HsiCube& cube, const Eigen::VectorXd& factors) {
    Eigen::MatrixXd out = cube.pixels_by_bands();
    for (Index b = 0; b < out.cols(); ++b) out.col(b) *= factors(b);
    return HsiCube(cube.rows(), cube.cols(), std::move(out));
}

Eigen::VectorXd median_spectrum(const HsiCube& cube, std::span<const Index> pixels) {
    Eigen::VectorXd out(cube.bands());
    std::vector<double> values(pixels.size());
    for (Index b = 0; b < cube.bands(); ++b) {
        for (std::size_t q = 0; q < pixels.size(); ++q) {
            values[q] = cube.pixels_by_bands()(pixels[q], b);
        }
        out(b) = median(values);
    }
    return out;
}

template <typename Fn>
auto run_stage(const std::string& name, RunReport& report, Fn&& fn) {
    using Cause = StageError::Cause;
    const auto start = std::chrono::steady_clock::now();
    try {
        auto result = fn();
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        report.stages.push_back({name, elapsed.count()});
        return result;
    } catch (const StageError&) {
        throw;
    } catch (const ConfigError& e) {
        throw StageError(name, e.what(), Cause::config);
    } catch (const NumericalError& e) {
        throw StageError(name, e.what(), Cause::numerical);
    } catch (const ShapeError& e) {
        throw StageError(name, e.what(), Cause::numerical);
    } catch (const std::exception& e) {
        throw StageError(name, e.what(), Cause::other);
    }
}

}  // namespace

HsiCube whiten(const HsiCube& cube, const NoiseStats& stats) {
    check_stats(cube, stats);
    return scale_bands(cube, stats.sigma.cwiseInverse());
}

HsiCube unwhiten(const HsiCube& cube, const NoiseStats& stats) {
    check_stats(cube, stats);
    return scale_bands(cube, stats.sigma);
}

std::vector<Index> select_clean_pixels(const NoiseMask& mask, Index min_pixels,
                                       std::vector<std::string>* warnings) {
    const Index pixels = mask.pixels();
    const Index bands = mask.bands();
    Eigen::VectorXi clean_bands = Eigen::VectorXi::Zero(pixels);
    for (Index b = 0; b < bands; ++b) {
        clean_bands += mask.bits().col(b).cast<int>().matrix();
    }

    std::vector<Index> selected;
    for (Index i = 0; i < pixels; ++i) {
        if (clean_bands(i) == bands) selected.push_back(i);
    }
    if (static_cast<Index>(selected.size()) >= min_pixels) return selected;

    const auto full = selected.size();
    selected.clear();
    const double need = kRelaxedCleanFraction * static_cast<double>(bands);
    for (Index i = 0; i < pixels; ++i) {
        if (static_cast<double>(clean_bands(i)) >= need) selected.push_back(i);
    }
    if (warnings) {
        warnings->push_back("only " + std::to_string(full) +
                            " fully clean pixels; using pixels with >= 95% clean bands");
    }
    if (static_cast<Index>(selected.size()) >= min_pixels) return selected;

    if (warnings) {
        warnings->push_back("only " + std::to_string(selected.size()) +
                            " mostly clean pixels; using all pixels");
    }
    selected.resize(static_cast<std::size_t>(pixels));
    for (Index i = 0; i < pixels; ++i) selected[static_cast<std::size_t>(i)] = i;
    return selected;
}

MaskedProjector::MaskedProjector(const SubspaceBasis& basis, Eigen::VectorXd fill)
    : basis_(basis.basis), fill_(std::move(fill)) {
    if (fill_.size() == 0) fill_ = Eigen::VectorXd::Zero(basis_.rows());
    if (fill_.size() != basis_.rows()) throw ShapeError("fill spectrum length mismatch");
    full_gram_ = basis_.transpose() * basis_;
}

Eigen::VectorXd MaskedProjector::project(const Eigen::Ref<const Eigen::VectorXd>& y,
                                         std::span<const std::uint8_t> mask) const {
    const Index bands = basis_.rows();
    const Index dim = basis_.cols();
    if (y.size() != bands || static_cast<Index>(mask.size()) != bands) {
        throw ShapeError("pixel spectrum and mask must have one entry per band");
    }
    Index clean = 0;
    for (auto m : mask) clean += m != 0 ? 1 : 0;

    if (clean < dim) {
        Eigen::VectorXd v(bands);
        for (Index b = 0; b < bands; ++b) v(b) = mask[static_cast<std::size_t>(b)] ? y(b) : fill_(b);
        return basis_.transpose() * v;
    }

    Eigen::MatrixXd gram(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    if (clean == bands) {
        gram = full_gram_;
        rhs.noalias() = basis_.transpose() * y;
    } else {
        gram.setZero();
        for (Index b = 0; b < bands; ++b) {
            if (!mask[static_cast<std::size_t>(b)]) continue;
            const auto row = basis_.row(b);
            gram.noalias() += row.transpose() * row;
            rhs.noalias() += row.transpose() * y(b);
        }
    }
    Eigen::MatrixXd reg = gram;
    reg.diagonal().array() += kMaskedRidge;
    const Eigen::LLT<Eigen::MatrixXd> llt(reg);
    Eigen::VectorXd z = llt.solve(rhs);
    z += llt.solve(rhs - gram * z);
    return z;
}

Eigen::VectorXd masked_projection(const Eigen::Ref<const Eigen::VectorXd>& y,
                                  std::span<const std::uint8_t> mask, const SubspaceBasis& basis,
                                  const Eigen::VectorXd& fill) {
    return MaskedProjector(basis, fill).project(y, mask);
}

HsiCube restore_sparse(const HsiCube& whitened, const NoiseMask& mask, const SubspaceBasis& basis,
                       const Eigen::VectorXd& fill, int threads) {
    if (mask.pixels() != whitened.pixels() || mask.bands() != whitened.bands() ||
        basis.bands() != whitened.bands()) {
        throw ShapeError("cube, mask and subspace basis disagree in shape");
    }
    const MaskedProjector projector(basis, fill);
    const Index bands = whitened.bands();
    const auto& y = whitened.pixels_by_bands();
    Eigen::MatrixXd out(whitened.pixels(), bands);
    parallel_for(whitened.pixels(), threads, [&](Index i) {
        std::vector<std::uint8_t> m(static_cast<std::size_t>(bands));
        for (Index b = 0; b < bands; ++b) m[static_cast<std::size_t>(b)] = mask.bits()(i, b);
        const Eigen::VectorXd spectrum = y.row(i).transpose();
        out.row(i).noalias() = (basis.basis * projector.project(spectrum, m)).transpose();
    });
    return HsiCube(whitened.rows(), whitened.cols(), std::move(out));
}

HsiCube denoise_eigen_images(const HsiCube& restored, const SubspaceBasis& basis,
                             const Denoiser& denoiser, int threads) {
    if (basis.bands() != restored.bands()) throw ShapeError("subspace basis band count mismatch");
    if (!denoiser) throw ConfigError("no denoiser configured");
    HsiCube eigen = mode3_product(restored, basis.basis.transpose());
    Eigen::MatrixXd out(eigen.pixels(), eigen.bands());
    parallel_for(eigen.bands(), threads, [&](Index p) {
        Eigen::MatrixXd slice = eigen.band(p);
        Eigen::MatrixXd result;
        try {
            result = denoiser(slice, 1.0);
        } catch (const std::exception& e) {
            throw StageError("denoise_eigen_images",
                             "denoiser failed on eigen-image " + std::to_string(p) + ": " + e.what(),
                             StageError::Cause::numerical);
        }
        if (result.rows() != slice.rows() || result.cols() != slice.cols() || !result.allFinite()) {
            throw StageError("denoise_eigen_images",
                             "denoiser returned an invalid image for eigen-image " + std::to_string(p),
                             StageError::Cause::numerical);
        }
        out.col(p) = result.reshaped();
    });
    return HsiCube(eigen.rows(), eigen.cols(), std::move(out));
}

PipelineResult denoise(const HsiCube& cube, const PipelineConfig& config) {
    PipelineResult result;
    RunReport& report = result.report;
    const Index bands = cube.bands();

    const Denoiser denoiser = config.custom_denoiser
                                  ? config.custom_denoiser
                                  : run_stage("configure", report, [&] { return make_denoiser(config.denoiser); });
    if (config.subspace_dim && (*config.subspace_dim < 1 || *config.subspace_dim > bands)) {
        throw StageError("configure",
                         "subspace dimension " + std::to_string(*config.subspace_dim) +
                             " is outside [1, " + std::to_string(bands) + "]",
                         StageError::Cause::config);
    }

    result.noise = run_stage("estimate_noise", report, [&] {
        return estimate_noise(cube, {config.em_seed, config.threads});
    });
    const NoiseStats& stats = result.noise.stats;
    const NoiseMask& mask = result.noise.mask;
    report.warnings = result.noise.warnings;
    report.sigma_per_band = stats.sigma;
    report.mask_zero_fraction = mask.zero_fraction();

    const HsiCube whitened = run_stage("whiten", report, [&] { return whiten(cube, stats); });

    const Index min_clean = config.min_clean_pixels.value_or(
        config.subspace_dim ? kCleanPixelsPerDim * *config.subspace_dim : 2 * bands);
    const auto clean = run_stage("select_clean_pixels", report, [&] {
        return select_clean_pixels(mask, min_clean, &report.warnings);
    });
    report.clean_pixels = static_cast<Index>(clean.size());

    const SubspaceBasis basis = run_stage("estimate_subspace", report, [&] {
        const PrincipalDirections pd = principal_directions(gather_pixels(whitened, clean));
        const Index dim = config.subspace_dim
                              ? *config.subspace_dim
                              : auto_subspace_dim(std::span(pd.singular_values.data(),
                                                            static_cast<std::size_t>(pd.singular_values.size())),
                                                  static_cast<Index>(clean.size()), bands);
        return truncate_subspace(pd, dim);
    });
    report.subspace_dim = basis.dim();

    const HsiCube restored = run_stage("restore_sparse", report, [&] {
        return restore_sparse(whitened, mask, basis, median_spectrum(whitened, clean), config.threads);
    });
    const HsiCube eigen = run_stage("denoise_eigen_images", report, [&] {
        return denoise_eigen_images(restored, basis, denoiser, config.threads);
    });
    const HsiCube reconstructed =
        run_stage("reconstruct", report, [&] { return mode3_product(eigen, basis.basis); });
    result.denoised = run_stage("unwhiten", report, [&] { return unwhiten(reconstructed, stats); });
    return result;
}

}  // namespace fasthymix
