#include "fasthymix/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fasthymix/errors.hpp"
#include "fasthymix/subspace.hpp"

namespace fasthymix {

namespace {

void check_fraction(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(what) + " must be in [0, 1]");
}

// Symmetric-boundary separable Gaussian blur.
Eigen::MatrixXd blur(const Eigen::MatrixXd& img, double sigma) {
    const auto radius = static_cast<Index>(std::ceil(3.0 * sigma));
    Eigen::VectorXd kernel(2 * radius + 1);
    for (Index k = -radius; k <= radius; ++k) {
        kernel(k + radius) = std::exp(-0.5 * static_cast<double>(k * k) / (sigma * sigma));
    }
    kernel /= kernel.sum();

    auto reflect = [](Index i, Index n) {
        if (n == 1) return Index{0};
        const Index period = 2 * n;
        i %= period;
        if (i < 0) i += period;
        return i < n ? i : period - 1 - i;
    };

    const Index rows = img.rows();
    const Index cols = img.cols();
    Eigen::MatrixXd tmp(rows, cols);
    for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < rows; ++r) {
            double s = 0.0;
            for (Index k = -radius; k <= radius; ++k) s += kernel(k + radius) * img(reflect(r + k, rows), c);
            tmp(r, c) = s;
        }
    }
    Eigen::MatrixXd out(rows, cols);
    for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < rows; ++r) {
            double s = 0.0;
            for (Index k = -radius; k <= radius; ++k) s += kernel(k + radius) * tmp(r, reflect(c + k, cols));
            out(r, c) = s;
        }
    }
    return out;
}

void apply_gaussian(Eigen::MatrixXd& data, const GaussianSpec& setup, Xoshiro256& rng,
                    Eigen::VectorXd& sigma) {
    if (!(setup.lo >= 0.0 && setup.hi >= setup.lo)) {
        throw ConfigError("Gaussian std range must satisfy 0 <= lo <= hi");
    }
    const Index bands = data.cols();
    sigma.resize(bands);
    for (Index b = 0; b < bands; ++b) sigma(b) = rng.uniform(setup.lo, setup.hi);
    for (Index b = 0; b < bands; ++b) {
        for (Index i = 0; i < data.rows(); ++i) data(i, b) += sigma(b) * rng.normal();
    }
}

void apply_stripes(Eigen::MatrixXd& data, Index rows, Index cols, const StripeSpec& setup,
                   Xoshiro256& rng, NoiseMask& mask) {
    check_fraction(setup.band_fraction, "stripe band fraction");
    check_fraction(setup.pixel_fraction, "stripe pixel fraction");
    const Index bands = data.cols();
    const auto n_bands = std::min<Index>(
        bands, static_cast<Index>(std::ceil(setup.band_fraction * static_cast<double>(bands) - 1e-9)));

    std::vector<Index> order(static_cast<std::size_t>(bands));
    std::iota(order.begin(), order.end(), Index{0});
    for (Index k = 0; k < n_bands; ++k) {
        const auto j = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(bands - k)));
        std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(j)]);
    }
    std::vector<Index> picked(order.begin(), order.begin() + n_bands);
    std::sort(picked.begin(), picked.end());

    const auto target = static_cast<Index>(std::llround(setup.pixel_fraction * static_cast<double>(rows * cols)));
    const Index lines = rows + cols - 1;
    auto line_length = [&](Index d) {
        return std::min(d, rows - 1) - std::max<Index>(0, d - (cols - 1)) + 1;
    };

    for (Index b : picked) {
        std::vector<Index> diag(static_cast<std::size_t>(lines));
        std::iota(diag.begin(), diag.end(), Index{0});
        for (Index k = lines - 1; k > 0; --k) {
            const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(k + 1)));
            std::swap(diag[static_cast<std::size_t>(k)], diag[static_cast<std::size_t>(j)]);
        }
        Index covered = 0;
        for (Index d : diag) {
            if (covered >= target) break;
            const Index len = line_length(d);
            if (static_cast<double>(covered + len) > 1.1 * static_cast<double>(target)) continue;
            covered += len;
            for (Index r = std::max<Index>(0, d - (cols - 1)); r <= std::min(d, rows - 1); ++r) {
                const Index pixel = r + (d - r) * rows;
                double v = 1.0;
                if (setup.value == StripeValue::min) v = 0.0;
                if (setup.value == StripeValue::random) v = rng.uniform();
                data(pixel, b) = v;
                mask.set(pixel, b, false);
            }
        }
    }
}

void apply_impulse(Eigen::MatrixXd& data, double density, Xoshiro256& rng, NoiseMask& mask) {
    check_fraction(density, "impulse density");
    for (Index b = 0; b < data.cols(); ++b) {
        for (Index i = 0; i < data.rows(); ++i) {
            if (rng.uniform() < density) {
                data(i, b) = rng.uniform() < 0.5 ? 0.0 : 1.0;
                mask.set(i, b, false);
            }
        }
    }
}

Simulation finish(const HsiCube& clean, Eigen::MatrixXd noisy, Eigen::VectorXd sigma, NoiseMask mask) {
    Eigen::MatrixXd noise = noisy - clean.pixels_by_bands();
    Simulation sim{HsiCube(clean.rows(), clean.cols(), std::move(noisy)),
                   {clean, std::move(sigma), std::move(mask),
                    HsiCube(clean.rows(), clean.cols(), std::move(noise))}};
    return sim;
}

}  // namespace

HsiCube make_clean(const HsiCube& cube, Index rank) {
    if (rank < 1 || rank > cube.bands()) {
        throw ShapeError("projection rank must be in [1, bands]");
    }
    const auto pd = principal_directions(unfold_mode3(cube).matrix());
    if (rank > pd.directions.cols()) throw ShapeError("projection rank exceeds the pixel count");
    const Eigen::MatrixXd e = pd.directions.leftCols(rank);
    return mode3_product(cube, e * e.transpose());
}

HsiCube synth_clean(Index rows, Index cols, Index bands, Index rank, std::uint64_t seed) {
    if (rows < 1 || cols < 1 || bands < 1) throw ShapeError("cube dimensions must be positive");
    if (rank < 1 || rank > bands || rank > rows * cols) {
        throw ShapeError("rank must be in [1, min(bands, pixels)]");
    }
    Xoshiro256 rng(seed);

    Eigen::MatrixXd maps(rows * cols, rank);
    for (Index p = 0; p < rank; ++p) {
        Eigen::MatrixXd noise(rows, cols);
        for (Index i = 0; i < noise.size(); ++i) noise.data()[i] = rng.normal();
        Eigen::MatrixXd smooth = blur(noise, kSynthBlurSigma);
        const double lo = smooth.minCoeff();
        const double hi = smooth.maxCoeff();
        if (hi > lo) {
            smooth = ((smooth.array() - lo) / (hi - lo)).matrix();
        } else {
            smooth.setConstant(0.5);
        }
        maps.col(p) = smooth.reshaped();
    }

    Eigen::MatrixXd seeds(bands, rank);
    seeds.col(0).setOnes();
    for (Index p = 1; p < rank; ++p) {
        for (Index b = 0; b < bands; ++b) seeds(b, p) = rng.normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(seeds);
    Eigen::MatrixXd signatures = qr.householderQ() * Eigen::MatrixXd::Identity(bands, rank);
    if (signatures.col(0).sum() < 0.0) signatures.col(0) = -signatures.col(0);

    Eigen::MatrixXd x = maps * signatures.transpose();
    const double lo = x.minCoeff();
    const double hi = x.maxCoeff();
    if (hi > lo) {
        x = (kSynthLow + (kSynthHigh - kSynthLow) * (x.array() - lo) / (hi - lo)).matrix();
    } else {
        x.setConstant(0.5 * (kSynthLow + kSynthHigh));
    }
    x = x.cwiseMax(0.0).cwiseMin(1.0);
    return HsiCube(rows, cols, std::move(x));
}

NoiseCase noise_case(int id, GaussianProfile profile) {
    NoiseCase c;
    c.id = id;
    const GaussianSpec base = profile == GaussianProfile::pavia ? GaussianSpec{0.05, 0.10}
                                                                : GaussianSpec{0.01, 0.02};
    const StripeSpec max_stripes{0.30, 0.10, StripeValue::max};
    switch (id) {
        case 1: c.gaussian = base; break;
        case 2: c.gaussian = base; c.stripes = max_stripes; break;
        case 3: c.gaussian = base; c.impulse_density = 0.005; break;
        case 4:
            c.gaussian = base;
            c.stripes = max_stripes;
            c.impulse_density = 0.005;
            break;
        case 5: c.gaussian = {0.0, 0.01}; c.stripes = max_stripes; break;
        case 6: c.gaussian = {0.0, 0.02}; c.stripes = max_stripes; break;
        case 7: c.gaussian = {0.01, 0.06}; c.stripes = max_stripes; break;
        case 8: c.gaussian = {0.05, 0.10}; c.stripes = max_stripes; break;
        case 9: c.gaussian = {0.01, 0.06}; c.stripes = StripeSpec{0.05, 0.10, StripeValue::max}; break;
        case 10: c.gaussian = {0.01, 0.06}; c.stripes = StripeSpec{0.30, 0.10, StripeValue::max}; break;
        case 11: c.gaussian = {0.01, 0.06}; c.stripes = StripeSpec{0.50, 0.10, StripeValue::max}; break;
        case 12: c.gaussian = {0.01, 0.06}; c.stripes = StripeSpec{0.70, 0.10, StripeValue::max}; break;
        case 13: c.gaussian = {0.01, 0.06}; c.impulse_density = 0.0001; break;
        case 14: c.gaussian = {0.01, 0.06}; c.impulse_density = 0.0005; break;
        case 15: c.gaussian = {0.01, 0.06}; c.impulse_density = 0.0010; break;
        case 16: c.gaussian = {0.01, 0.06}; c.impulse_density = 0.0050; break;
        case 17: c.gaussian = {0.05, 0.10}; c.stripes = StripeSpec{0.30, 0.10, StripeValue::min}; break;
        case 18: c.gaussian = {0.05, 0.10}; c.stripes = StripeSpec{0.30, 0.10, StripeValue::random}; break;
        default: throw ConfigError("unknown noise case " + std::to_string(id) + " (expected 1-18)");
    }
    return c;
}

Simulation add_gaussian_noniid(const HsiCube& clean, double lo, double hi, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    Eigen::MatrixXd data = clean.pixels_by_bands();
    Eigen::VectorXd sigma;
    apply_gaussian(data, {lo, hi}, rng, sigma);
    return finish(clean, std::move(data), std::move(sigma),
                  NoiseMask(clean.rows(), clean.cols(), clean.bands()));
}

Simulation add_stripes(const HsiCube& clean, double band_fraction, double pixel_fraction,
                       StripeValue value, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    Eigen::MatrixXd data = clean.pixels_by_bands();
    NoiseMask mask(clean.rows(), clean.cols(), clean.bands());
    apply_stripes(data, clean.rows(), clean.cols(), {band_fraction, pixel_fraction, value}, rng, mask);
    return finish(clean, std::move(data), Eigen::VectorXd::Zero(clean.bands()), std::move(mask));
}

Simulation add_salt_pepper(const HsiCube& clean, double density, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    Eigen::MatrixXd data = clean.pixels_by_bands();
    NoiseMask mask(clean.rows(), clean.cols(), clean.bands());
    apply_impulse(data, density, rng, mask);
    return finish(clean, std::move(data), Eigen::VectorXd::Zero(clean.bands()), std::move(mask));
}

Simulation simulate(const HsiCube& clean, const NoiseCase& setup, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    Eigen::MatrixXd data = clean.pixels_by_bands();
    NoiseMask mask(clean.rows(), clean.cols(), clean.bands());
    Eigen::VectorXd sigma;
    apply_gaussian(data, setup.gaussian, rng, sigma);
    if (setup.stripes) apply_stripes(data, clean.rows(), clean.cols(), *setup.stripes, rng, mask);
    if (setup.impulse_density) apply_impulse(data, *setup.impulse_density, rng, mask);
    return finish(clean, std::move(data), std::move(sigma), std::move(mask));
}

Simulation simulate_case(const HsiCube& clean, int case_id, std::uint64_t seed, GaussianProfile profile) {
    return simulate(clean, noise_case(case_id, profile), seed);
}

std::string to_string(StripeValue value) {
    switch (value) {
        case StripeValue::max: return "max";
        case StripeValue::min: return "min";
        case StripeValue::random: return "random";
    }
    return "unknown";
}

}  // namespace fasthymix
