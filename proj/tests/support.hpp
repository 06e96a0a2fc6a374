#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <unistd.h>

#include <Eigen/Dense>

#include "fasthymix/hsi_cube.hpp"
#include "fasthymix/rng.hpp"

namespace fasthymix::testing {

inline Eigen::MatrixXd random_matrix(Index rows, Index cols, Xoshiro256& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

inline HsiCube random_cube(Index rows, Index cols, Index bands, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    return HsiCube(rows, cols, random_matrix(rows * cols, bands, rng));
}

/// Random matrix with orthonormal columns.
inline Eigen::MatrixXd random_orthonormal(Index rows, Index cols, Xoshiro256& rng) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(rows, cols, rng));
    return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

/// Exactly rank-`rank` cube with unit-scale spectra.
inline HsiCube low_rank_cube(Index rows, Index cols, Index bands, Index rank, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    const Eigen::MatrixXd coeff = random_matrix(rows * cols, rank, rng);
    const Eigen::MatrixXd sig = random_matrix(bands, rank, rng);
    return HsiCube(rows, cols, Eigen::MatrixXd(coeff * sig.transpose()));
}

inline double max_rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        Xoshiro256 rng(reinterpret_cast<std::uintptr_t>(this) ^ static_cast<std::uint64_t>(::getpid()));
        path_ = std::filesystem::temp_directory_path() /
                ("fasthymix_" + tag + "_" + std::to_string(rng.next() % 1000000007ull));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace fasthymix::testing
