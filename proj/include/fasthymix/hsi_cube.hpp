#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>

namespace fasthymix {

using Index = Eigen::Index;

/// Bands-by-pixels matrix: column j is the spectrum of pixel j.
///
/// Pixels are linearized column-major over (row, col): j = row + col * rows.
/// The same linearization is used by HsiCube storage, the container format
/// and every pixel-indexed vector in the library.
class Mode3Matrix {
public:
    Mode3Matrix() = default;
    explicit Mode3Matrix(Eigen::MatrixXd values) : values_(std::move(values)) {}

    Index bands() const { return values_.rows(); }
    Index pixels() const { return values_.cols(); }

    const Eigen::MatrixXd& matrix() const { return values_; }
    Eigen::MatrixXd& matrix() { return values_; }

private:
    Eigen::MatrixXd values_;
};

/// Hyperspectral cube of rows x cols x bands finite doubles.
///
/// Storage is band-sequential: an (rows*cols) x bands column-major matrix,
/// i.e. the transpose of the mode-3 unfolding. Band b is one contiguous
/// column-major rows x cols plane.
class HsiCube {
public:
    HsiCube() = default;

    /// Zero-filled cube. Throws ShapeError if any dimension is < 1.
    HsiCube(Index rows, Index cols, Index bands);

    /// Takes ownership of a pixels x bands matrix. Throws ShapeError on a
    /// size mismatch and NumericalError on non-finite entries.
    HsiCube(Index rows, Index cols, Eigen::MatrixXd pixels_by_bands);

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    Index bands() const { return data_.cols(); }
    Index pixels() const { return rows_ * cols_; }
    Index size() const { return data_.size(); }

    double operator()(Index row, Index col, Index band) const {
        return data_(row + col * rows_, band);
    }
    double& operator()(Index row, Index col, Index band) {
        return data_(row + col * rows_, band);
    }

    /// Pixels x bands view (Y_(3) transposed).
    const Eigen::MatrixXd& pixels_by_bands() const { return data_; }
    Eigen::MatrixXd& pixels_by_bands() { return data_; }

    /// Band b as a rows x cols image.
    Eigen::Map<const Eigen::MatrixXd> band(Index b) const {
        return {data_.col(b).data(), rows_, cols_};
    }
    Eigen::Map<Eigen::MatrixXd> band(Index b) {
        return {data_.col(b).data(), rows_, cols_};
    }

    std::span<const double> values() const {
        return {data_.data(), static_cast<std::size_t>(data_.size())};
    }

    bool all_finite() const { return data_.allFinite(); }

    friend bool operator==(const HsiCube& a, const HsiCube& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
               a.data_.cols() == b.data_.cols() && a.data_ == b.data_;
    }

private:
    Index rows_ = 0;
    Index cols_ = 0;
    Eigen::MatrixXd data_;
};

/// Rearranges the pixel spectra of a cube as columns of a bands x pixels matrix.
Mode3Matrix unfold_mode3(const HsiCube& cube);

/// Inverse of unfold_mode3. Throws ShapeError unless m has rows*cols columns.
HsiCube fold_mode3(const Mode3Matrix& m, Index rows, Index cols);

/// Mode-3 product: returns the cube whose unfolding is m * unfold_mode3(cube).
HsiCube mode3_product(const HsiCube& cube, const Eigen::MatrixXd& m);

double frobenius_norm(const HsiCube& cube);

}  // namespace fasthymix
