#pragma once

#include <cstdint>

#include "fasthymix/errors.hpp"
#include "fasthymix/hsi_cube.hpp"

namespace fasthymix {

/// Binary element mask over a cube: 1 = corrupted by Gaussian noise only,
/// 0 = corrupted by sparse (impulse / stripe) noise. Same pixels x bands
/// layout as HsiCube.
class NoiseMask {
public:
    using Storage = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

    NoiseMask() = default;

    /// All-ones mask.
    NoiseMask(Index rows, Index cols, Index bands)
        : rows_(rows), cols_(cols), bits_(Storage::Ones(rows * cols, bands)) {}

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    Index bands() const { return bits_.cols(); }
    Index pixels() const { return bits_.rows(); }

    bool clean(Index pixel, Index band) const { return bits_(pixel, band) != 0; }
    void set(Index pixel, Index band, bool clean) { bits_(pixel, band) = clean ? 1 : 0; }

    const Storage& bits() const { return bits_; }
    Storage& bits() { return bits_; }

    /// Number of zero (sparse-corrupted) elements.
    Index zero_count() const { return bits_.size() - (bits_ != 0).count(); }

    double zero_fraction() const {
        return bits_.size() == 0 ? 0.0
                                 : static_cast<double>(zero_count()) / static_cast<double>(bits_.size());
    }

    /// 0/1 cube for container serialization.
    HsiCube to_cube() const {
        return HsiCube(rows_, cols_, bits_.cast<double>().matrix());
    }

    /// Throws ShapeError if any element is neither 0 nor 1.
    static NoiseMask from_cube(const HsiCube& cube) {
        NoiseMask mask(cube.rows(), cube.cols(), cube.bands());
        const auto& v = cube.pixels_by_bands();
        for (Index b = 0; b < v.cols(); ++b) {
            for (Index i = 0; i < v.rows(); ++i) {
                const double x = v(i, b);
                if (x != 0.0 && x != 1.0) throw ShapeError("mask element is not 0 or 1");
                mask.bits_(i, b) = x == 1.0 ? 1 : 0;
            }
        }
        return mask;
    }

    friend bool operator==(const NoiseMask& a, const NoiseMask& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.bits_.cols() == b.bits_.cols() &&
               (a.bits_ == b.bits_).all();
    }

private:
    Index rows_ = 0;
    Index cols_ = 0;
    Storage bits_;
};

}  // namespace fasthymix
