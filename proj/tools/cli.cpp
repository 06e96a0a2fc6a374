#include "cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fasthymix/container.hpp"
#include "fasthymix/errors.hpp"
#include "fasthymix/metrics.hpp"
#include "fasthymix/noise_model.hpp"
#include "fasthymix/pipeline.hpp"
#include "fasthymix/reports.hpp"
#include "fasthymix/simulator.hpp"

namespace fasthymix::cli {

namespace fs = std::filesystem;

namespace {

class IoError : public Error {
public:
    using Error::Error;
};

struct SimulateArgs {
    std::string input;
    Index rows = 64;
    Index cols = 64;
    Index bands = 60;
    Index rank = 8;
    std::uint64_t clean_seed = 0;
    int case_id = 1;
    std::uint64_t seed = 0;
    std::string profile = "pavia";
    std::string output;
};

struct EstimateArgs {
    std::string input;
    std::string output;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct DenoiseArgs {
    std::string input;
    std::string output;
    std::string config;
    std::optional<std::string> subspace_dim;
    std::optional<std::string> denoiser;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> report;
    std::optional<int> threads;
};

struct EvaluateArgs {
    std::string reference;
    std::string input;
    std::string mask;
    std::string mask_truth;
    std::string output;
    std::string csv;
    double peak = 1.0;
};

void require_input(const std::string& path) {
    if (!fs::is_regular_file(path)) throw IoError("input file not found: " + path);
}

void prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory: " + dir);
}

void prepare_parent(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) prepare_dir(parent.string());
}

std::optional<Index> parse_subspace_dim(const std::string& text) {
    if (text == "auto") return std::nullopt;
    std::size_t used = 0;
    long long value = 0;
    try {
        value = std::stoll(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("subspace dimension must be a positive integer or 'auto': " + text);
    }
    if (used != text.size() || value < 1) {
        throw ConfigError("subspace dimension must be a positive integer or 'auto': " + text);
    }
    return static_cast<Index>(value);
}

GaussianProfile parse_profile(const std::string& name) {
    if (name == "pavia") return GaussianProfile::pavia;
    if (name == "dc_mall") return GaussianProfile::dc_mall;
    throw ConfigError("unknown profile: " + name);
}

int cmd_simulate(const SimulateArgs& a, std::ostream& log) {
    const NoiseCase setup = noise_case(a.case_id, parse_profile(a.profile));
    HsiCube clean;
    if (!a.input.empty()) {
        require_input(a.input);
        clean = read_container(a.input);
    } else {
        if (a.rows < 1 || a.cols < 1 || a.bands < 1) throw ConfigError("cube dimensions must be positive");
        if (a.rank < 1 || a.rank > std::min(a.bands, a.rows * a.cols)) {
            throw ConfigError("rank must be in [1, min(bands, rows*cols)]");
        }
        clean = synth_clean(a.rows, a.cols, a.bands, a.rank, a.clean_seed);
    }
    prepare_dir(a.output);
    log << "simulate: case " << a.case_id << ", seed " << a.seed << ", cube " << clean.rows() << "x"
        << clean.cols() << "x" << clean.bands() << "\n";
    const Simulation sim = simulate(clean, setup, a.seed);
    const fs::path dir(a.output);
    write_container(sim.noisy, dir / "noisy.hyc");
    write_container(sim.truth.clean, dir / "clean.hyc");
    write_container(sim.truth.mask.to_cube(), dir / "mask_true.hyc", ScalarType::f32);
    write_json(truth_json(setup, a.seed, sim.truth), dir / "truth.json");
    return kOk;
}

int cmd_estimate_noise(const EstimateArgs& a, std::ostream& log) {
    if (a.threads < 1) throw ConfigError("threads must be positive");
    require_input(a.input);
    const HsiCube cube = read_container(a.input);
    prepare_dir(a.output);
    NoiseOptions options;
    options.em_seed = a.seed;
    options.threads = a.threads;
    const NoiseEstimate est = estimate_noise(cube, options);
    log << "estimate-noise: " << cube.bands() << " bands, mask zero fraction "
        << est.mask.zero_fraction() << "\n";
    for (const auto& w : est.warnings) log << "warning: " << w << "\n";
    const fs::path dir(a.output);
    write_json(to_json(est), dir / "sigma.json");
    write_container(est.mask.to_cube(), dir / "mask.hyc", ScalarType::f32);
    return kOk;
}

void apply_config_file(const std::string& path, PipelineConfig& config, std::optional<std::string>& report) {
    require_input(path);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "spec_version") {
                continue;
            } else if (key == "subspace_dim") {
                config.subspace_dim =
                    value.is_string() ? parse_subspace_dim(value.get<std::string>())
                                      : parse_subspace_dim(std::to_string(value.get<long long>()));
            } else if (key == "denoiser") {
                if (value.is_string()) {
                    config.denoiser.name = value.get<std::string>();
                } else {
                    config.denoiser.name = value.at("name").get<std::string>();
                    if (value.contains("parameters")) {
                        config.denoiser.parameters = value.at("parameters").get<std::map<std::string, double>>();
                    }
                }
            } else if (key == "seed") {
                config.em_seed = value.get<std::uint64_t>();
            } else if (key == "threads") {
                config.threads = value.get<int>();
            } else if (key == "min_clean_pixels") {
                config.min_clean_pixels = value.get<Index>();
            } else if (key == "report") {
                report = value.get<std::string>();
            } else {
                throw ConfigError("unknown config key: " + key);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid config value: ") + e.what());
    }
}

int cmd_denoise(const DenoiseArgs& a, std::ostream& log) {
    PipelineConfig config;
    std::optional<std::string> report = a.report;
    if (!a.config.empty()) {
        std::optional<std::string> file_report;
        apply_config_file(a.config, config, file_report);
        if (!report) report = file_report;
    }
    if (a.subspace_dim) config.subspace_dim = parse_subspace_dim(*a.subspace_dim);
    if (a.denoiser) config.denoiser = DenoiserSpec{*a.denoiser, {}};
    if (a.seed) config.em_seed = *a.seed;
    if (a.threads) config.threads = *a.threads;
    if (config.threads < 1) throw ConfigError("threads must be positive");
    make_denoiser(config.denoiser);

    require_input(a.input);
    prepare_parent(a.output);
    if (report) prepare_parent(*report);
    const HsiCube cube = read_container(a.input);
    const PipelineResult result = denoise(cube, config);
    for (const auto& s : result.report.stages) log << "stage " << s.name << ": " << s.seconds << " s\n";
    log << "subspace dim " << result.report.subspace_dim << ", clean pixels " << result.report.clean_pixels
        << "\n";
    for (const auto& w : result.report.warnings) log << "warning: " << w << "\n";
    write_container(result.denoised, a.output);
    if (report) write_json(to_json(result.report), *report);
    return kOk;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& log) {
    if (!(a.peak > 0.0)) throw ConfigError("peak must be positive");
    if (a.mask.empty() != a.mask_truth.empty()) {
        throw ConfigError("--mask and --mask-truth must be given together");
    }
    require_input(a.reference);
    require_input(a.input);
    if (!a.mask.empty()) {
        require_input(a.mask);
        require_input(a.mask_truth);
    }
    prepare_parent(a.output);
    if (!a.csv.empty()) prepare_parent(a.csv);
    const HsiCube ref = read_container(a.reference);
    const HsiCube test = read_container(a.input);
    MetricReport report = evaluate(ref, test, a.peak);
    if (!a.mask.empty()) {
        const NoiseMask est = NoiseMask::from_cube(read_container(a.mask));
        const NoiseMask truth = NoiseMask::from_cube(read_container(a.mask_truth));
        report.mask = mask_prf(est, truth);
    }
    log << "evaluate: MPSNR " << report.mpsnr << " dB, MSSIM " << report.mssim << ", MSAD " << report.msad
        << "\n";
    write_json(to_json(report), a.output);
    if (!a.csv.empty()) write_band_csv(report, a.csv);
    return kOk;
}

int exit_code_for(StageError::Cause cause) {
    switch (cause) {
        case StageError::Cause::config:
            return kConfigError;
        case StageError::Cause::numerical:
            return kNumericalError;
        default:
            return kIoError;
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& log) {
    CLI::App app{"Hyperspectral mixed-noise removal"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Generate a noisy cube with ground truth");
    simulate->add_option("--input", sim.input, "Clean cube (HYC1); synthetic if omitted");
    simulate->add_option("--rows", sim.rows, "Synthetic rows")->capture_default_str();
    simulate->add_option("--cols", sim.cols, "Synthetic columns")->capture_default_str();
    simulate->add_option("--bands", sim.bands, "Synthetic bands")->capture_default_str();
    simulate->add_option("--rank", sim.rank, "Synthetic spectral rank")->capture_default_str();
    simulate->add_option("--clean-seed", sim.clean_seed, "Synthetic cube seed")->capture_default_str();
    simulate->add_option("--case", sim.case_id, "Noise case 1-18")->required();
    simulate->add_option("--seed", sim.seed, "Noise seed")->capture_default_str();
    simulate->add_option("--profile", sim.profile, "Gaussian profile for cases 1-4 (pavia|dc_mall)")
        ->capture_default_str();
    simulate->add_option("--output", sim.output, "Output directory")->required();

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate-noise", "Estimate per-band sigma and the sparse-noise mask");
    estimate->add_option("--input", est.input, "Noisy cube (HYC1)")->required();
    estimate->add_option("--output", est.output, "Output directory")->required();
    estimate->add_option("--seed", est.seed, "EM seed")->capture_default_str();
    estimate->add_option("--threads", est.threads, "Worker threads")->capture_default_str();

    DenoiseArgs den;
    auto* denoise_cmd = app.add_subcommand("denoise", "Run the full restoration pipeline");
    denoise_cmd->add_option("--input", den.input, "Noisy cube (HYC1)")->required();
    denoise_cmd->add_option("--output", den.output, "Denoised cube (HYC1)")->required();
    denoise_cmd->add_option("--config", den.config, "JSON config with the same keys as the flags");
    denoise_cmd->add_option("--subspace-dim", den.subspace_dim, "Subspace dimension or 'auto'");
    denoise_cmd->add_option("--denoiser", den.denoiser, "identity|dct");
    denoise_cmd->add_option("--seed", den.seed, "EM seed (default 0)");
    denoise_cmd->add_option("--report", den.report, "RunReport JSON path");
    denoise_cmd->add_option("--threads", den.threads, "Worker threads (default 1)");

    EvaluateArgs ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Compare a cube against a reference");
    evaluate_cmd->add_option("--reference", ev.reference, "Reference cube (HYC1)")->required();
    evaluate_cmd->add_option("--input", ev.input, "Cube to score (HYC1)")->required();
    evaluate_cmd->add_option("--mask", ev.mask, "Estimated mask (HYC1)");
    evaluate_cmd->add_option("--mask-truth", ev.mask_truth, "True mask (HYC1)");
    evaluate_cmd->add_option("--output", ev.output, "MetricReport JSON path")->required();
    evaluate_cmd->add_option("--csv", ev.csv, "Per-band CSV path");
    evaluate_cmd->add_option("--peak", ev.peak, "PSNR peak value")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        log << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        log << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim, log);
        if (estimate->parsed()) return cmd_estimate_noise(est, log);
        if (denoise_cmd->parsed()) return cmd_denoise(den, log);
        return cmd_evaluate(ev, log);
    } catch (const StageError& e) {
        log << "error in " << e.stage() << ": " << e.what() << "\n";
        return exit_code_for(e.cause());
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ShapeError& e) {
        log << "shape error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericalError& e) {
        log << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        log << "I/O error: " << e.what() << "\n";
        return kIoError;
    }
}

}  // namespace fasthymix::cli
