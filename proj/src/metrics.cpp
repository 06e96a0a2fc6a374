#include "fasthymix/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fasthymix/errors.hpp"

namespace fasthymix {

namespace {

void same_shape(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::MatrixXd>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("images differ in shape");
}

void same_shape(const HsiCube& a, const HsiCube& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.bands() != b.bands()) {
        throw ShapeError("cubes differ in shape");
    }
}

// (rows+1) x (cols+1) summed-area table.
Eigen::MatrixXd integral(const Eigen::MatrixXd& img) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(img.rows() + 1, img.cols() + 1);
    for (Index c = 0; c < img.cols(); ++c) {
        for (Index r = 0; r < img.rows(); ++r) {
            s(r + 1, c + 1) = img(r, c) + s(r, c + 1) + s(r + 1, c) - s(r, c);
        }
    }
    return s;
}

double window_sum(const Eigen::MatrixXd& s, Index r, Index c, Index n) {
    return s(r + n, c + n) - s(r, c + n) - s(r + n, c) + s(r, c);
}

}  // namespace

double psnr(const Eigen::Ref<const Eigen::MatrixXd>& reference,
            const Eigen::Ref<const Eigen::MatrixXd>& test, double peak) {
    same_shape(reference, test);
    if (!(peak > 0.0)) throw ConfigError("PSNR peak must be positive");
    if (reference.size() == 0) throw ShapeError("PSNR of empty images");
    const double mse = (reference - test).squaredNorm() / static_cast<double>(reference.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Eigen::Ref<const Eigen::MatrixXd>& reference,
            const Eigen::Ref<const Eigen::MatrixXd>& test, double peak) {
    same_shape(reference, test);
    const Index n = kSsimWindow;
    if (reference.rows() < n || reference.cols() < n) {
        throw ShapeError("SSIM needs images of at least 8x8");
    }
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    const Eigen::MatrixXd x = reference;
    const Eigen::MatrixXd y = test;
    const Eigen::MatrixXd sx = integral(x);
    const Eigen::MatrixXd sy = integral(y);
    const Eigen::MatrixXd sxx = integral(x.cwiseProduct(x));
    const Eigen::MatrixXd syy = integral(y.cwiseProduct(y));
    const Eigen::MatrixXd sxy = integral(x.cwiseProduct(y));

    const double count = static_cast<double>(n * n);
    double total = 0.0;
    Index windows = 0;
    for (Index c = 0; c + n <= x.cols(); ++c) {
        for (Index r = 0; r + n <= x.rows(); ++r) {
            const double mx = window_sum(sx, r, c, n) / count;
            const double my = window_sum(sy, r, c, n) / count;
            const double vx = std::max(0.0, window_sum(sxx, r, c, n) / count - mx * mx);
            const double vy = std::max(0.0, window_sum(syy, r, c, n) / count - my * my);
            const double cxy = window_sum(sxy, r, c, n) / count - mx * my;
            total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
                     ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++windows;
        }
    }
    return std::clamp(total / static_cast<double>(windows), -1.0, 1.0);
}

SadResult sad(const HsiCube& reference, const HsiCube& test) {
    same_shape(reference, test);
    const auto& a = reference.pixels_by_bands();
    const auto& b = test.pixels_by_bands();
    SadResult out;
    double total = 0.0;
    Index used = 0;
    for (Index i = 0; i < a.rows(); ++i) {
        const double na = a.row(i).norm();
        const double nb = b.row(i).norm();
        if (na == 0.0 || nb == 0.0) {
            ++out.excluded;
            continue;
        }
        const double cosine = std::clamp(a.row(i).dot(b.row(i)) / (na * nb), -1.0, 1.0);
        total += std::acos(cosine);
        ++used;
    }
    out.mean_angle = used > 0 ? total / static_cast<double>(used) : 0.0;
    return out;
}

MaskScores mask_prf(const NoiseMask& estimate, const NoiseMask& truth) {
    if (estimate.pixels() != truth.pixels() || estimate.bands() != truth.bands()) {
        throw ShapeError("masks differ in shape");
    }
    const auto est_pos = estimate.bits() == 0;
    const auto true_pos = truth.bits() == 0;
    const auto tp = static_cast<double>((est_pos && true_pos).count());
    const auto predicted = static_cast<double>(est_pos.count());
    const auto actual = static_cast<double>(true_pos.count());
    MaskScores s;
    s.precision = predicted > 0.0 ? tp / predicted : 0.0;
    s.recall = actual > 0.0 ? tp / actual : 0.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    if (predicted == 0.0 && actual == 0.0) s = {1.0, 1.0, 1.0};
    return s;
}

MetricReport evaluate(const HsiCube& reference, const HsiCube& test, double peak) {
    same_shape(reference, test);
    MetricReport rep;
    const Index bands = reference.bands();
    rep.psnr_per_band.resize(bands);
    rep.ssim_per_band.resize(bands);
    double psnr_sum = 0.0;
    Index finite = 0;
    for (Index b = 0; b < bands; ++b) {
        rep.psnr_per_band(b) = psnr(reference.band(b), test.band(b), peak);
        rep.ssim_per_band(b) = ssim(reference.band(b), test.band(b), peak);
        if (std::isfinite(rep.psnr_per_band(b))) {
            psnr_sum += rep.psnr_per_band(b);
            ++finite;
        } else {
            ++rep.infinite_psnr_bands;
        }
    }
    rep.mpsnr = finite > 0 ? psnr_sum / static_cast<double>(finite)
                           : std::numeric_limits<double>::infinity();
    rep.mssim = rep.ssim_per_band.mean();
    const auto angle = sad(reference, test);
    rep.msad = angle.mean_angle;
    rep.sad_excluded_pixels = angle.excluded;
    return rep;
}

}  // namespace fasthymix
