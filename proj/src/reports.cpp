#include "fasthymix/reports.hpp"

#include <cmath>
#include <fstream>
#include <vector>

#include "fasthymix/errors.hpp"

namespace fasthymix {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const RunReport& report) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : report.stages) stages.push_back({{"name", s.name}, {"seconds", s.seconds}});
    return {
        {"spec_version", kSpecVersion},
        {"stages", stages},
        {"sigma_per_band", to_vector(report.sigma_per_band)},
        {"mask_zero_fraction", report.mask_zero_fraction},
        {"subspace_dim", report.subspace_dim},
        {"clean_pixels", report.clean_pixels},
        {"warnings", report.warnings},
    };
}

nlohmann::json to_json(const NoiseEstimate& estimate) {
    nlohmann::json bands = nlohmann::json::array();
    for (const auto& b : estimate.bands) {
        nlohmann::json gmm = nullptr;
        if (b.gmm) {
            gmm = {{"pi", to_vector(b.gmm->pi)},
                   {"mu", to_vector(b.gmm->mu)},
                   {"sigma2", to_vector(b.gmm->sigma2)},
                   {"loglik", b.gmm->loglik},
                   {"iters", b.gmm->iterations}};
        }
        bands.push_back({{"sigma", b.sigma},
                         {"gaussian_gate", b.gaussian_gate},
                         {"gmm", gmm},
                         {"fallback_used", b.fallback_used}});
    }
    return {
        {"spec_version", kSpecVersion},
        {"sigma_per_band", to_vector(estimate.stats.sigma)},
        {"mask_zero_fraction", estimate.mask.zero_fraction()},
        {"bands", bands},
        {"warnings", estimate.warnings},
    };
}

nlohmann::json to_json(const MetricReport& report) {
    nlohmann::json psnr = nlohmann::json::array();
    for (Index b = 0; b < report.psnr_per_band.size(); ++b) psnr.push_back(finite_or_null(report.psnr_per_band(b)));
    nlohmann::json doc = {
        {"spec_version", kSpecVersion},
        {"psnr_per_band", psnr},
        {"ssim_per_band", to_vector(report.ssim_per_band)},
        {"mpsnr", finite_or_null(report.mpsnr)},
        {"infinite_psnr_bands", report.infinite_psnr_bands},
        {"mssim", report.mssim},
        {"msad", report.msad},
        {"sad_excluded_pixels", report.sad_excluded_pixels},
        {"mask", nullptr},
    };
    if (report.mask) {
        doc["mask"] = {{"precision", report.mask->precision},
                       {"recall", report.mask->recall},
                       {"f1", report.mask->f1}};
    }
    return doc;
}

nlohmann::json truth_json(const NoiseCase& setup, std::uint64_t seed, const GroundTruth& truth) {
    nlohmann::json stripes = nullptr;
    if (setup.stripes) {
        stripes = {{"band_fraction", setup.stripes->band_fraction},
                   {"pixel_fraction", setup.stripes->pixel_fraction},
                   {"value", to_string(setup.stripes->value)}};
    }
    return {
        {"spec_version", kSpecVersion},
        {"case", setup.id},
        {"seed", seed},
        {"gaussian_range", {setup.gaussian.lo, setup.gaussian.hi}},
        {"sigma_per_band", to_vector(truth.sigma)},
        {"stripe_params", stripes},
        {"impulse_density", setup.impulse_density ? nlohmann::json(*setup.impulse_density) : nlohmann::json(nullptr)},
        {"mask_zero_fraction", truth.mask.zero_fraction()},
    };
}

void write_band_csv(const MetricReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.precision(17);
    out << "band,psnr_db,ssim\n";
    for (Index b = 0; b < report.psnr_per_band.size(); ++b) {
        out << b << ',';
        if (std::isfinite(report.psnr_per_band(b))) {
            out << report.psnr_per_band(b);
        } else {
            out << "inf";
        }
        out << ',' << report.ssim_per_band(b) << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

void write_json(const nlohmann::json& doc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace fasthymix
