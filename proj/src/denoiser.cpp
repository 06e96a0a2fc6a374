#include "fasthymix/denoiser.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "fasthymix/errors.hpp"

namespace fasthymix {

namespace {

Eigen::MatrixXd dct_matrix(int n) {
    Eigen::MatrixXd c(n, n);
    for (int k = 0; k < n; ++k) {
        const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
        for (int i = 0; i < n; ++i) {
            c(k, i) = scale * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
        }
    }
    return c;
}

std::vector<Eigen::Index> window_starts(Eigen::Index extent, int block, int stride) {
    std::vector<Eigen::Index> starts;
    for (Eigen::Index s = 0; s + block <= extent; s += stride) starts.push_back(s);
    if (starts.back() + block < extent) starts.push_back(extent - block);
    return starts;
}

}  // namespace

Eigen::MatrixXd dct_denoise(const Eigen::MatrixXd& img, double sigma, double threshold, int block,
                            int stride) {
    if (!(sigma >= 0.0)) throw ConfigError("denoiser sigma must be nonnegative");
    if (block < 1 || stride < 1 || stride > block) {
        throw ConfigError("DCT stride must be in [1, block]");
    }
    if (sigma == 0.0 || img.size() == 0) return img;

    const Eigen::Index rows = std::max<Eigen::Index>(img.rows(), block);
    const Eigen::Index cols = std::max<Eigen::Index>(img.cols(), block);
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(rows, cols);
    padded.topLeftCorner(img.rows(), img.cols()) = img;

    const Eigen::MatrixXd c = dct_matrix(block);
    const double cut = threshold * sigma;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::MatrixXd coeff(block, block);

    for (Eigen::Index r0 : window_starts(rows, block, stride)) {
        for (Eigen::Index c0 : window_starts(cols, block, stride)) {
            coeff.noalias() = c * padded.block(r0, c0, block, block) * c.transpose();
            for (int j = 0; j < block; ++j) {
                for (int i = 0; i < block; ++i) {
                    if ((i != 0 || j != 0) && std::abs(coeff(i, j)) < cut) coeff(i, j) = 0.0;
                }
            }
            acc.block(r0, c0, block, block).noalias() += c.transpose() * coeff * c;
            weight.block(r0, c0, block, block).array() += 1.0;
        }
    }
    return (acc.array() / weight.array()).matrix().topLeftCorner(img.rows(), img.cols());
}

Denoiser make_denoiser(const DenoiserSpec& setup) {
    if (setup.name == "identity") {
        if (!setup.parameters.empty()) throw ConfigError("identity denoiser takes no parameters");
        return [](const Eigen::MatrixXd& img, double) { return img; };
    }
    if (setup.name == "dct") {
        double threshold = kDctThreshold;
        int block = kDctBlock;
        int stride = kDctStride;
        for (const auto& [key, value] : setup.parameters) {
            if (key == "threshold") {
                threshold = value;
            } else if (key == "block") {
                block = static_cast<int>(value);
            } else if (key == "stride") {
                stride = static_cast<int>(value);
            } else {
                throw ConfigError("unknown dct denoiser parameter '" + key + "'");
            }
        }
        if (!(threshold >= 0.0) || block < 1 || stride < 1 || stride > block) {
            throw ConfigError("invalid dct denoiser parameters");
        }
        return [=](const Eigen::MatrixXd& img, double sigma) {
            return dct_denoise(img, sigma, threshold, block, stride);
        };
    }
    throw ConfigError("unknown denoiser '" + setup.name + "'");
}

}  // namespace fasthymix
