#include "fasthymix/noise_model.hpp"

#include <cmath>
#include <string>

#include "fasthymix/errors.hpp"
#include "fasthymix/parallel.hpp"
#include "fasthymix/stats.hpp"

namespace fasthymix {

namespace {

constexpr double kMadToSigma = 1.4826;
constexpr double kFallbackOutlierSigmas = 4.0;
constexpr double kSigmaFloorFraction = 1e-6;

Eigen::MatrixXd gram(const Eigen::MatrixXd& yt) {
    const Index b = yt.cols();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(b, b);
    g.selfadjointView<Eigen::Lower>().rankUpdate(yt.transpose());
    return g.selfadjointView<Eigen::Lower>();
}

std::vector<Index> others(Index bands, Index b) {
    std::vector<Index> idx;
    idx.reserve(static_cast<std::size_t>(bands - 1));
    for (Index k = 0; k < bands; ++k) {
        if (k != b) idx.push_back(k);
    }
    return idx;
}

// Full-length weight vector w with w(b) = 1 and w(others) = -beta, so the
// residual is Y^T w.
Eigen::VectorXd residual_weights(const Eigen::MatrixXd& g, Index b) {
    const Index bands = g.rows();
    const auto idx = others(bands, b);
    const Eigen::MatrixXd a = g(idx, idx);
    const Eigen::VectorXd rhs = g(idx, Eigen::all).col(b);

    const double scale = a.trace() / static_cast<double>(bands - 1);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(bands - 1);
    if (scale > 0.0) {
        Eigen::MatrixXd reg = a;
        reg.diagonal().array() += kRegressionRidge * scale;
        Eigen::LLT<Eigen::MatrixXd> llt(reg);
        if (llt.info() != Eigen::Success) {
            throw NumericalError("regression system for band " + std::to_string(b) +
                                 " is singular");
        }
        beta = llt.solve(rhs);
        beta += llt.solve(rhs - a * beta);
        if (!beta.allFinite()) {
            throw NumericalError("regression for band " + std::to_string(b) +
                                 " produced non-finite coefficients");
        }
    }
    Eigen::VectorXd w(bands);
    Index k = 0;
    for (Index j = 0; j < bands; ++j) w(j) = j == b ? 1.0 : -beta(k++);
    return w;
}

void require_two_bands(Index bands) {
    if (bands < 2) throw ShapeError("coarse noise estimation needs at least two bands");
}

struct Moments {
    double m2, m3, m4;
};

Moments central_moments(std::span<const double> v) {
    if (v.size() < 2) throw DegenerateInputError("moments need at least two samples");
    const double m = mean(v);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0, scale = 0.0;
    for (double x : v) {
        const double d = x - m;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        scale = std::max(scale, std::abs(x));
    }
    const auto n = static_cast<double>(v.size());
    m2 /= n;
    m3 /= n;
    m4 /= n;
    // Variance at rounding level of the values counts as zero.
    const double tiny = 1e-14 * scale;
    if (!(m2 > tiny * tiny)) throw DegenerateInputError("zero variance");
    return {m2, m3, m4};
}

struct BandResult {
    BandNoiseReport report;
    std::string warning;
};

BandResult analyse_band(std::span<const double> xi, double floor, std::uint64_t seed,
                        Index b, NoiseMask::Storage::ColXpr mask_col) {
    BandResult out;
    auto& rep = out.report;
    mask_col.setOnes();

    const double sd = population_std(xi);
    if (sd <= floor) {
        rep.sigma = floor;
        rep.gaussian_gate = true;
        return out;
    }

    bool gaussian = false;
    try {
        gaussian = is_gaussian(xi);
    } catch (const DegenerateInputError&) {
        gaussian = false;
    }
    if (gaussian) {
        rep.sigma = sd;
        rep.gaussian_gate = true;
        return out;
    }

    try {
        EmOptions em;
        em.seed = seed;
        const GmmParams fit = gmm_em_fit(xi, gmm_default_init(xi, 2), em);
        const int g = fit.pi(0) > fit.pi(1)   ? 0
                      : fit.pi(1) > fit.pi(0) ? 1
                      : (fit.sigma2(1) < fit.sigma2(0) ? 1 : 0);
        const auto labels = gmm_cluster(xi, fit);
        std::vector<double> group;
        group.reserve(xi.size());
        for (std::size_t i = 0; i < xi.size(); ++i) {
            if (labels[i] == g) {
                group.push_back(xi[i]);
            } else {
                mask_col(static_cast<Index>(i)) = 0;
            }
        }
        rep.sigma = std::max(group.size() >= 2 ? population_std(group) : 0.0, floor);
        rep.gmm = fit;
    } catch (const NumericalError& e) {
        mask_col.setOnes();
        rep.sigma = std::max(kMadToSigma * median_absolute_deviation(xi), floor);
        rep.fallback_used = true;
        for (std::size_t i = 0; i < xi.size(); ++i) {
            if (std::abs(xi[i]) > kFallbackOutlierSigmas * rep.sigma) {
                mask_col(static_cast<Index>(i)) = 0;
            }
        }
        out.warning = "band " + std::to_string(b) + ": mixture fit failed (" + e.what() +
                      "); using MAD fallback";
    }
    return out;
}

}  // namespace

Eigen::VectorXd coarse_noise_band(const Eigen::MatrixXd& pixels_by_bands, Index band) {
    require_two_bands(pixels_by_bands.cols());
    if (band < 0 || band >= pixels_by_bands.cols()) throw ShapeError("band index out of range");
    const Eigen::VectorXd w = residual_weights(gram(pixels_by_bands), band);
    return pixels_by_bands * w;
}

CoarseNoise coarse_noise(const HsiCube& cube, int threads) {
    require_two_bands(cube.bands());
    const auto& yt = cube.pixels_by_bands();
    const Eigen::MatrixXd g = gram(yt);
    const Index bands = cube.bands();
    Eigen::MatrixXd weights(bands, bands);
    parallel_for(bands, threads, [&](Index b) { weights.col(b) = residual_weights(g, b); });
    return {yt * weights};
}

double skewness(std::span<const double> v) {
    const auto m = central_moments(v);
    return m.m3 / std::pow(m.m2, 1.5);
}

double kurtosis(std::span<const double> v) {
    const auto m = central_moments(v);
    return m.m4 / (m.m2 * m.m2);
}

bool is_gaussian(std::span<const double> xi) {
    const auto m = central_moments(xi);
    const double skew = m.m3 / std::pow(m.m2, 1.5);
    const double kurt = m.m4 / (m.m2 * m.m2);
    return std::abs(skew) < kSkewnessLimit && std::abs(kurt) < kKurtosisLimit;
}

NoiseEstimate estimate_noise(const HsiCube& cube, const NoiseOptions& options) {
    const Index bands = cube.bands();
    const CoarseNoise coarse = coarse_noise(cube, options.threads);

    double range = value_range(cube.values());
    const double floor = kSigmaFloorFraction * (range > 0.0 ? range : 1.0);

    NoiseEstimate est;
    est.mask = NoiseMask(cube.rows(), cube.cols(), bands);
    std::vector<BandResult> results(static_cast<std::size_t>(bands));
    parallel_for(bands, options.threads, [&](Index b) {
        const auto col = coarse.residuals.col(b);
        const std::span<const double> xi(col.data(), static_cast<std::size_t>(col.size()));
        results[static_cast<std::size_t>(b)] =
            analyse_band(xi, floor, options.em_seed + static_cast<std::uint64_t>(b), b,
                         est.mask.bits().col(b));
    });

    est.stats.sigma.resize(bands);
    for (Index b = 0; b < bands; ++b) {
        auto& r = results[static_cast<std::size_t>(b)];
        est.stats.sigma(b) = r.report.sigma;
        if (!r.warning.empty()) est.warnings.push_back(std::move(r.warning));
        est.bands.push_back(std::move(r.report));
    }
    return est;
}

}  // namespace fasthymix
