#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fasthymix/hsi_cube.hpp"
#include "fasthymix/noise_mask.hpp"
#include "fasthymix/rng.hpp"

namespace fasthymix {

/// Rank-P projection of the cube's spectra onto its top-P left singular
/// vectors. ShapeError if P is not in [1, bands].
HsiCube make_clean(const HsiCube& cube, Index rank);

/// Smooth synthetic cube of spectral rank `rank`.
///
/// Each of the `rank` coefficient maps is seeded white noise blurred by a
/// Gaussian of std kSynthBlurSigma pixels and rescaled to [0, 1]. The
/// spectral signatures are orthonormal: the first is flat, the others are
/// random directions orthogonalized against it. The combined cube is
/// affinely rescaled to [kSynthLow, kSynthHigh]; its rank is unchanged.
HsiCube synth_clean(Index rows, Index cols, Index bands, Index rank, std::uint64_t seed);

inline constexpr double kSynthBlurSigma = 1.0;
inline constexpr double kSynthLow = 0.1;
inline constexpr double kSynthHigh = 0.9;

enum class StripeValue { max, min, random };

struct GaussianSpec {
    double lo = 0.0;  ///< per-band std drawn from U(lo, hi)
    double hi = 0.0;
};

struct StripeSpec {
    double band_fraction = 0.3;
    double pixel_fraction = 0.1;
    StripeValue value = StripeValue::max;
};

/// One noise scenario: Gaussian, then stripes, then salt & pepper.
struct NoiseCase {
    int id = 0;  ///< 0 for a custom composition
    GaussianSpec gaussian;
    std::optional<StripeSpec> stripes;
    std::optional<double> impulse_density;
};

/// Gaussian std profile used by cases 1-4.
enum class GaussianProfile {
    pavia,    ///< U(0.05, 0.10)
    dc_mall,  ///< U(0.01, 0.02)
};

/// Parameters of cases 1-18. ConfigError for any other id.
NoiseCase noise_case(int id, GaussianProfile profile = GaussianProfile::pavia);

struct GroundTruth {
    HsiCube clean;
    Eigen::VectorXd sigma;  ///< per-band Gaussian std (zeros if no Gaussian noise)
    NoiseMask mask;         ///< 0 exactly where stripes or impulses were written
    HsiCube noise;          ///< noisy - clean
};

struct Simulation {
    HsiCube noisy;
    GroundTruth truth;
};

/// Per-band sigma_b ~ U(lo, hi), then every element gets N(0, sigma_b^2).
///
/// RNG stream: B uniforms for the sigmas in band order, then one normal per
/// element in storage order (band by band, pixels column-major).
Simulation add_gaussian_noniid(const HsiCube& clean, double lo, double hi, std::uint64_t seed);

/// Oblique (45 degree, one pixel wide) stripes.
///
/// ceil(band_fraction * B) bands are picked by a partial Fisher-Yates
/// shuffle. For each picked band, in ascending band order, the anti-diagonals
/// row + col = d are visited in a fresh Fisher-Yates order and a line is
/// kept while the covered count is below round(pixel_fraction * r * c) and
/// keeping it would not exceed that target by more than 10%. Kept lines are
/// written top row first with 1 (max), 0 (min) or one uniform draw per
/// element (random).
Simulation add_stripes(const HsiCube& clean, double band_fraction, double pixel_fraction,
                       StripeValue value, std::uint64_t seed);

/// Every element independently, in storage order, draws u; if u < density a
/// second draw picks 0 (< 0.5) or 1.
Simulation add_salt_pepper(const HsiCube& clean, double density, std::uint64_t seed);

/// Applies the case generators in order Gaussian, stripes, impulse on one
/// RNG stream seeded with `seed`.
Simulation simulate(const HsiCube& clean, const NoiseCase& setup, std::uint64_t seed);

Simulation simulate_case(const HsiCube& clean, int case_id, std::uint64_t seed,
                         GaussianProfile profile = GaussianProfile::pavia);

std::string to_string(StripeValue value);

}  // namespace fasthymix
