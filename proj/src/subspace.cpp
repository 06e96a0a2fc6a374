#include "fasthymix/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fasthymix/errors.hpp"

namespace fasthymix {

namespace {

void fix_signs(Eigen::MatrixXd& u) {
    for (Index k = 0; k < u.cols(); ++k) {
        Index arg = 0;
        u.col(k).cwiseAbs().maxCoeff(&arg);
        if (u(arg, k) < 0.0) u.col(k) = -u.col(k);
    }
}

}  // namespace

PrincipalDirections principal_directions(const Eigen::MatrixXd& samples) {
    const Index rows = samples.rows();
    const Index cols = samples.cols();
    if (rows < 1 || cols < 1) throw ShapeError("principal directions of an empty matrix");
    PrincipalDirections pd;
    if (cols >= 2 * rows) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(rows, rows);
        g.selfadjointView<Eigen::Lower>().rankUpdate(samples);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
        eig.compute(g.selfadjointView<Eigen::Lower>());
        if (eig.info() != Eigen::Success) throw NumericalError("Gram eigendecomposition failed");
        // Eigenvalues come out ascending.
        pd.directions = eig.eigenvectors().rowwise().reverse();
        pd.singular_values = eig.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(samples, Eigen::ComputeThinU);
        pd.directions = svd.matrixU();
        pd.singular_values = svd.singularValues();
    }
    fix_signs(pd.directions);
    return pd;
}

Eigen::MatrixXd gather_pixels(const HsiCube& cube, std::span<const Index> pixels) {
    Eigen::MatrixXd out(cube.bands(), static_cast<Index>(pixels.size()));
    const auto& data = cube.pixels_by_bands();
    for (std::size_t q = 0; q < pixels.size(); ++q) {
        const Index i = pixels[q];
        if (i < 0 || i >= cube.pixels()) throw ShapeError("pixel index out of range");
        out.col(static_cast<Index>(q)) = data.row(i).transpose();
    }
    return out;
}

SubspaceBasis truncate_subspace(const PrincipalDirections& pd, Index dim) {
    if (dim < 1 || dim > pd.directions.cols()) {
        throw InsufficientDataError("subspace dimension " + std::to_string(dim) +
                                    " exceeds the " + std::to_string(pd.directions.cols()) +
                                    " available directions");
    }
    return {pd.directions.leftCols(dim), pd.singular_values};
}

SubspaceBasis estimate_subspace(const HsiCube& whitened, std::span<const Index> pixels, Index dim) {
    if (dim < 1 || dim > whitened.bands()) {
        throw ShapeError("subspace dimension must be in [1, bands]");
    }
    if (static_cast<Index>(pixels.size()) < dim) {
        throw InsufficientDataError(std::to_string(pixels.size()) +
                                    " clean pixels cannot span a subspace of dimension " +
                                    std::to_string(dim));
    }
    return truncate_subspace(principal_directions(gather_pixels(whitened, pixels)), dim);
}

Index auto_subspace_dim(std::span<const double> singular_values, Index samples, Index bands) {
    if (singular_values.empty() || bands < 1) throw ShapeError("empty singular spectrum");
    double total = 0.0;
    for (double s : singular_values) total += s * s;
    if (!(total > 0.0)) throw DegenerateInputError("all-zero singular spectrum");

    const auto n = static_cast<Index>(singular_values.size());
    Index energy_dim = n;
    double cum = 0.0;
    for (Index k = 0; k < n; ++k) {
        cum += singular_values[static_cast<std::size_t>(k)] * singular_values[static_cast<std::size_t>(k)];
        if (cum >= kAutoEnergyFraction * total) {
            energy_dim = k + 1;
            break;
        }
    }

    const double q = static_cast<double>(std::max<Index>(samples, 1));
    const double edge = q * std::pow(1.0 + std::sqrt(static_cast<double>(bands) / q), 2) *
                        kAutoNoiseEdgeMargin;
    Index above_noise = 0;
    double tail = 0.0;
    for (double s : singular_values) {
        if (s * s > edge) {
            ++above_noise;
        } else {
            tail += s * s;
        }
    }
    // Without a unit-variance floor in the tail the edge says nothing.
    const bool noise_floor =
        n > above_noise && tail >= kAutoNoiseFloorFraction * q * static_cast<double>(n - above_noise);
    const Index signal = noise_floor ? std::min(energy_dim, std::max<Index>(above_noise, 1)) : energy_dim;
    return std::min(signal + kAutoDimInflation, bands);
}

}  // namespace fasthymix
