#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "fasthymix/metrics.hpp"
#include "fasthymix/noise_model.hpp"
#include "fasthymix/pipeline.hpp"
#include "fasthymix/simulator.hpp"

namespace fasthymix {

/// Version tag written into every JSON artifact.
inline constexpr const char* kSpecVersion = "1.0";

/// {stages: [{name, seconds}], sigma_per_band, mask_zero_fraction,
///  subspace_dim, clean_pixels, warnings}
nlohmann::json to_json(const RunReport& report);

/// {sigma_per_band, mask_zero_fraction, bands: [{sigma, gaussian_gate,
///  gmm: {pi, mu, sigma2, loglik, iters} | null, fallback_used}], warnings}
nlohmann::json to_json(const NoiseEstimate& estimate);

/// Infinite PSNRs are written as null.
nlohmann::json to_json(const MetricReport& report);

/// {case, seed, sigma_per_band, stripe_params | null, impulse_density | null,
///  gaussian_range}
nlohmann::json truth_json(const NoiseCase& setup, std::uint64_t seed, const GroundTruth& truth);

/// Per-band CSV with header "band,psnr_db,ssim"; infinite PSNR is "inf".
void write_band_csv(const MetricReport& report, const std::filesystem::path& path);

/// Pretty-printed JSON with a trailing newline. Error on I/O failure.
void write_json(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace fasthymix
