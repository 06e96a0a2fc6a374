#include "fasthymix/hsi_cube.hpp"

#include <string>

#include "fasthymix/errors.hpp"

namespace fasthymix {

namespace {

void check_dims(Index rows, Index cols, Index bands) {
    if (rows < 1 || cols < 1 || bands < 1) {
        throw ShapeError("cube dimensions must be positive, got " +
                         std::to_string(rows) + "x" + std::to_string(cols) +
                         "x" + std::to_string(bands));
    }
}

}  // namespace

HsiCube::HsiCube(Index rows, Index cols, Index bands)
    : rows_(rows), cols_(cols) {
    check_dims(rows, cols, bands);
    data_ = Eigen::MatrixXd::Zero(rows * cols, bands);
}

HsiCube::HsiCube(Index rows, Index cols, Eigen::MatrixXd pixels_by_bands)
    : rows_(rows), cols_(cols), data_(std::move(pixels_by_bands)) {
    check_dims(rows, cols, data_.cols());
    if (data_.rows() != rows * cols) {
        throw ShapeError("pixel count " + std::to_string(data_.rows()) +
                         " does not match " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
    if (!data_.allFinite()) {
        throw NumericalError("cube contains non-finite values");
    }
}

Mode3Matrix unfold_mode3(const HsiCube& cube) {
    return Mode3Matrix(cube.pixels_by_bands().transpose());
}

HsiCube fold_mode3(const Mode3Matrix& m, Index rows, Index cols) {
    if (rows < 1 || cols < 1 || m.pixels() != rows * cols) {
        throw ShapeError("cannot fold " + std::to_string(m.pixels()) +
                         " columns into " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " pixels");
    }
    return HsiCube(rows, cols, m.matrix().transpose());
}

HsiCube mode3_product(const HsiCube& cube, const Eigen::MatrixXd& m) {
    if (m.cols() != cube.bands()) {
        throw ShapeError("mode-3 product needs " + std::to_string(cube.bands()) +
                         " matrix columns, got " + std::to_string(m.cols()));
    }
    Eigen::MatrixXd out = cube.pixels_by_bands() * m.transpose();
    return HsiCube(cube.rows(), cube.cols(), std::move(out));
}

double frobenius_norm(const HsiCube& cube) {
    return cube.pixels_by_bands().norm();
}

}  // namespace fasthymix
