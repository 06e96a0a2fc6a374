#pragma once

#include <span>

#include "fasthymix/hsi_cube.hpp"

namespace fasthymix {

/// Left singular vectors and singular values of a matrix, singular values
/// non-increasing. Each direction's largest-magnitude entry is positive.
struct PrincipalDirections {
    Eigen::MatrixXd directions;       ///< rows x min(rows, cols) orthonormal columns
    Eigen::VectorXd singular_values;  ///< non-increasing, nonnegative
};

/// SVD of a tall-or-wide data matrix whose columns are samples. When the
/// sample count is at least twice the row count, the rows x rows Gram
/// matrix is eigendecomposed instead of forming the full SVD.
PrincipalDirections principal_directions(const Eigen::MatrixXd& samples);

/// Orthonormal B x P basis of a spectral subspace.
struct SubspaceBasis {
    Eigen::MatrixXd basis;
    Eigen::VectorXd singular_values;  ///< of the matrix the basis was learned from

    Index bands() const { return basis.rows(); }
    Index dim() const { return basis.cols(); }
};

/// B x Q matrix whose columns are the spectra of the given pixels.
Eigen::MatrixXd gather_pixels(const HsiCube& cube, std::span<const Index> pixels);

/// First `dim` left singular vectors of the selected pixels' spectra.
/// InsufficientDataError when fewer than `dim` pixels are given.
SubspaceBasis estimate_subspace(const HsiCube& whitened, std::span<const Index> pixels, Index dim);

/// Same, from an already computed decomposition.
SubspaceBasis truncate_subspace(const PrincipalDirections& pd, Index dim);

/// Energy fraction that the auto-selected dimension must capture.
inline constexpr double kAutoEnergyFraction = 1.0 - 1e-4;
/// Margin over the unit-noise Marchenko-Pastur edge for a component to count as signal.
inline constexpr double kAutoNoiseEdgeMargin = 1.5;
/// Minimum tail energy per remaining component, relative to `samples`,
/// for the tail to be treated as unit-variance noise.
inline constexpr double kAutoNoiseFloorFraction = 0.25;
/// Deliberate overestimate added to the detected dimension.
inline constexpr Index kAutoDimInflation = 5;

/// Subspace dimension for whitened (unit noise variance) data with
/// `samples` columns: the smallest P capturing kAutoEnergyFraction of the
/// energy, capped by the number of singular values whose square exceeds
/// the noise edge samples * (1 + sqrt(bands / samples))^2 * margin when
/// the remaining components look like unit-variance noise, plus
/// kAutoDimInflation, clamped to `bands`. DegenerateInputError on an
/// all-zero spectrum.
Index auto_subspace_dim(std::span<const double> singular_values, Index samples, Index bands);

}  // namespace fasthymix
