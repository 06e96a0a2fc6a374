#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "fasthymix/container.hpp"
#include "fasthymix/reports.hpp"
#include "support.hpp"

using namespace fasthymix;
using namespace fasthymix::testing;

namespace {

int run_cli(std::vector<std::string> args, std::string* log = nullptr) {
    args.insert(args.begin(), "fasthymix");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out);
    if (log) *log = out.str();
    return code;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json load_json(const std::filesystem::path& p) { return nlohmann::json::parse(slurp(p)); }

std::vector<std::string> simulate_args(const TempDir& dir, const std::string& sub, int id = 1,
                                       const std::string& seed = "0") {
    return {"simulate", "--case", std::to_string(id), "--seed", seed, "--rows", "24", "--cols", "20",
            "--bands", "12", "--rank", "3", "--output", (dir / sub).string()};
}

}  // namespace

TEST(Cli, SimulateWritesFourFiles) {
    TempDir dir("cli_sim");
    ASSERT_EQ(run_cli(simulate_args(dir, "a")), cli::kOk);
    for (const char* f : {"noisy.hyc", "clean.hyc", "mask_true.hyc", "truth.json"}) {
        EXPECT_TRUE(std::filesystem::is_regular_file(dir / "a" / f)) << f;
    }
    const auto truth = load_json(dir / "a" / "truth.json");
    EXPECT_EQ(truth["spec_version"], kSpecVersion);
    EXPECT_EQ(truth["case"], 1);
    EXPECT_EQ(truth["seed"], 0);
    EXPECT_EQ(truth["sigma_per_band"].size(), 12u);
    EXPECT_TRUE(truth["stripe_params"].is_null());
    EXPECT_EQ(read_container(dir / "a" / "noisy.hyc").bands(), 12);
}

TEST(Cli, SimulateIsBitReproducible) {
    TempDir dir("cli_rep");
    ASSERT_EQ(run_cli(simulate_args(dir, "a", 4)), cli::kOk);
    ASSERT_EQ(run_cli(simulate_args(dir, "b", 4)), cli::kOk);
    ASSERT_EQ(run_cli(simulate_args(dir, "c", 4, "1")), cli::kOk);
    for (const char* f : {"noisy.hyc", "clean.hyc", "mask_true.hyc", "truth.json"}) {
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    }
    EXPECT_NE(slurp(dir / "a" / "noisy.hyc"), slurp(dir / "c" / "noisy.hyc"));
}

TEST(Cli, SimulateFromInputCube) {
    TempDir dir("cli_in");
    write_container(low_rank_cube(10, 10, 6, 2, 1), dir / "clean_in.hyc");
    ASSERT_EQ(run_cli({"simulate", "--case", "3", "--input", (dir / "clean_in.hyc").string(), "--output",
                       (dir / "o").string()}),
              cli::kOk);
    EXPECT_EQ(slurp(dir / "clean_in.hyc"), slurp(dir / "o" / "clean.hyc"));
}

TEST(Cli, SimulateErrors) {
    TempDir dir("cli_simerr");
    EXPECT_EQ(run_cli(simulate_args(dir, "a", 99)), cli::kConfigError);
    EXPECT_EQ(run_cli({"simulate", "--case", "1", "--profile", "mars", "--output", (dir / "b").string()}),
              cli::kConfigError);
    EXPECT_EQ(run_cli({"simulate", "--output", (dir / "c").string()}), cli::kConfigError);
    EXPECT_EQ(run_cli({"simulate", "--case", "1", "--input", (dir / "missing.hyc").string(), "--output",
                       (dir / "d").string()}),
              cli::kIoError);
    EXPECT_EQ(run_cli({}), cli::kConfigError);
    EXPECT_EQ(run_cli({"frobnicate"}), cli::kConfigError);
}

TEST(Cli, EstimateNoise) {
    TempDir dir("cli_est");
    ASSERT_EQ(run_cli(simulate_args(dir, "s", 4)), cli::kOk);
    ASSERT_EQ(run_cli({"estimate-noise", "--input", (dir / "s" / "noisy.hyc").string(), "--output",
                       (dir / "e").string()}),
              cli::kOk);
    const auto doc = load_json(dir / "e" / "sigma.json");
    EXPECT_EQ(doc["spec_version"], kSpecVersion);
    ASSERT_EQ(doc["bands"].size(), 12u);
    for (const auto& b : doc["bands"]) {
        EXPECT_TRUE(b.contains("sigma"));
        EXPECT_TRUE(b.contains("gaussian_gate"));
        EXPECT_TRUE(b.contains("fallback_used"));
        if (b["gaussian_gate"].get<bool>()) {
            EXPECT_TRUE(b["gmm"].is_null());
        } else if (!b["gmm"].is_null()) {
            for (const char* k : {"pi", "mu", "sigma2", "loglik", "iters"}) EXPECT_TRUE(b["gmm"].contains(k));
        }
    }
    const HsiCube mask = read_container(dir / "e" / "mask.hyc");
    EXPECT_EQ(mask.bands(), 12);
    EXPECT_EQ(mask.rows(), 24);
}

TEST(Cli, EstimateNoiseErrors) {
    TempDir dir("cli_esterr");
    EXPECT_EQ(run_cli({"estimate-noise", "--input", (dir / "nope.hyc").string(), "--output", (dir / "e").string()}),
              cli::kIoError);
    std::ofstream(dir / "junk.hyc") << "not a cube";
    EXPECT_EQ(run_cli({"estimate-noise", "--input", (dir / "junk.hyc").string(), "--output", (dir / "e").string()}),
              cli::kIoError);
    write_container(random_cube(4, 4, 1, 0), dir / "one.hyc");
    EXPECT_NE(run_cli({"estimate-noise", "--input", (dir / "one.hyc").string(), "--output", (dir / "e").string()}),
              cli::kOk);
}

TEST(Cli, DenoiseAutoAndExplicit) {
    TempDir dir("cli_den");
    ASSERT_EQ(run_cli(simulate_args(dir, "s", 2)), cli::kOk);
    const std::string noisy = (dir / "s" / "noisy.hyc").string();
    std::string log;
    ASSERT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "auto.hyc").string(), "--report",
                       (dir / "auto.json").string()},
                      &log),
              cli::kOk);
    EXPECT_NE(log.find("stage restore_sparse"), std::string::npos);
    const auto report = load_json(dir / "auto.json");
    EXPECT_EQ(report["spec_version"], kSpecVersion);
    for (const char* k : {"stages", "sigma_per_band", "mask_zero_fraction", "subspace_dim", "warnings"}) {
        EXPECT_TRUE(report.contains(k)) << k;
    }
    EXPECT_EQ(report["stages"].size(), 9u);
    EXPECT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "p4.hyc").string(), "--subspace-dim", "4",
                       "--report", (dir / "p4.json").string()}),
              cli::kOk);
    EXPECT_EQ(load_json(dir / "p4.json")["subspace_dim"], 4);
    EXPECT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "a2.hyc").string(), "--subspace-dim",
                       "auto", "--denoiser", "identity"}),
              cli::kOk);
    EXPECT_EQ(read_container(dir / "p4.hyc").bands(), 12);
}

TEST(Cli, DenoiseThreadsDoNotChangeOutput) {
    TempDir dir("cli_thr");
    ASSERT_EQ(run_cli(simulate_args(dir, "s", 4)), cli::kOk);
    const std::string noisy = (dir / "s" / "noisy.hyc").string();
    ASSERT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "t1.hyc").string(), "--threads", "1"}),
              cli::kOk);
    ASSERT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "t8.hyc").string(), "--threads", "8"}),
              cli::kOk);
    EXPECT_EQ(slurp(dir / "t1.hyc"), slurp(dir / "t8.hyc"));
}

TEST(Cli, DenoiseConfigFileAndOverrides) {
    TempDir dir("cli_cfg");
    ASSERT_EQ(run_cli(simulate_args(dir, "s", 1)), cli::kOk);
    const std::string noisy = (dir / "s" / "noisy.hyc").string();
    std::ofstream(dir / "cfg.json") << R"({"subspace_dim": 5, "denoiser": {"name": "dct", "parameters": {"threshold": 3.0}},
        "seed": 2, "report": ")" << (dir / "from_cfg.json").string()
                                    << R"("})";
    ASSERT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "c.hyc").string(), "--config",
                       (dir / "cfg.json").string()}),
              cli::kOk);
    EXPECT_EQ(load_json(dir / "from_cfg.json")["subspace_dim"], 5);
    ASSERT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "d.hyc").string(), "--config",
                       (dir / "cfg.json").string(), "--subspace-dim", "3", "--report", (dir / "flag.json").string()}),
              cli::kOk);
    EXPECT_EQ(load_json(dir / "flag.json")["subspace_dim"], 3);

    std::ofstream(dir / "bad.json") << R"({"subspace_dim": "lots"})";
    EXPECT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "e.hyc").string(), "--config",
                       (dir / "bad.json").string()}),
              cli::kConfigError);
    std::ofstream(dir / "unknown.json") << R"({"flavour": 1})";
    EXPECT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "e.hyc").string(), "--config",
                       (dir / "unknown.json").string()}),
              cli::kConfigError);
    std::ofstream(dir / "broken.json") << "{";
    EXPECT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "e.hyc").string(), "--config",
                       (dir / "broken.json").string()}),
              cli::kConfigError);
}

TEST(Cli, DenoiseErrors) {
    TempDir dir("cli_denerr");
    ASSERT_EQ(run_cli(simulate_args(dir, "s", 1)), cli::kOk);
    const std::string noisy = (dir / "s" / "noisy.hyc").string();
    auto bytes = slurp(noisy);
    bytes[1] = 'Z';
    std::ofstream(dir / "bad.hyc", std::ios::binary) << bytes;
    EXPECT_EQ(run_cli({"denoise", "--input", (dir / "bad.hyc").string(), "--output", (dir / "o.hyc").string()}),
              cli::kIoError);
    EXPECT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "o.hyc").string(), "--denoiser", "ffdnet"}),
              cli::kConfigError);
    EXPECT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "o.hyc").string(), "--subspace-dim", "0"}),
              cli::kConfigError);
    EXPECT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "o.hyc").string(), "--subspace-dim", "99"}),
              cli::kConfigError);
    EXPECT_EQ(run_cli({"denoise", "--input", noisy, "--output", (dir / "o.hyc").string(), "--threads", "0"}),
              cli::kConfigError);
    EXPECT_FALSE(std::filesystem::exists(dir / "o.hyc"));
}

TEST(Cli, EvaluateIdenticalAndMasks) {
    TempDir dir("cli_eval");
    ASSERT_EQ(run_cli(simulate_args(dir, "s", 3)), cli::kOk);
    const std::string clean = (dir / "s" / "clean.hyc").string();
    ASSERT_EQ(run_cli({"evaluate", "--reference", clean, "--input", clean, "--output", (dir / "m.json").string(),
                       "--csv", (dir / "m.csv").string()}),
              cli::kOk);
    const auto m = load_json(dir / "m.json");
    EXPECT_EQ(m["spec_version"], kSpecVersion);
    EXPECT_NEAR(m["mssim"].get<double>(), 1.0, 1e-12);
    EXPECT_EQ(m["infinite_psnr_bands"], 12);
    EXPECT_TRUE(m["mask"].is_null());
    const std::string csv = slurp(dir / "m.csv");
    EXPECT_EQ(csv.rfind("band,psnr_db,ssim\n", 0), 0u);
    EXPECT_NE(csv.find("0,inf,"), std::string::npos);

    ASSERT_EQ(run_cli({"estimate-noise", "--input", (dir / "s" / "noisy.hyc").string(), "--output",
                       (dir / "e").string()}),
              cli::kOk);
    ASSERT_EQ(run_cli({"evaluate", "--reference", clean, "--input", (dir / "s" / "noisy.hyc").string(), "--mask",
                       (dir / "e" / "mask.hyc").string(), "--mask-truth", (dir / "s" / "mask_true.hyc").string(),
                       "--output", (dir / "n.json").string()}),
              cli::kOk);
    const auto n = load_json(dir / "n.json");
    for (const char* k : {"precision", "recall", "f1"}) EXPECT_TRUE(n["mask"].contains(k));
}

TEST(Cli, EvaluateErrors) {
    TempDir dir("cli_evalerr");
    ASSERT_EQ(run_cli(simulate_args(dir, "s", 1)), cli::kOk);
    const std::string clean = (dir / "s" / "clean.hyc").string();
    EXPECT_EQ(run_cli({"evaluate", "--reference", clean, "--input", (dir / "missing.hyc").string(), "--output",
                       (dir / "m.json").string()}),
              cli::kIoError);
    write_container(random_cube(3, 3, 2, 0), dir / "small.hyc");
    EXPECT_EQ(run_cli({"evaluate", "--reference", clean, "--input", (dir / "small.hyc").string(), "--output",
                       (dir / "m.json").string()}),
              cli::kConfigError);
    EXPECT_EQ(run_cli({"evaluate", "--reference", clean, "--input", clean, "--mask", clean, "--output",
                       (dir / "m.json").string()}),
              cli::kConfigError);
}

TEST(Cli, EndToEndExperiment) {
    TempDir dir("cli_e2e");
    ASSERT_EQ(run_cli({"simulate", "--case", "1", "--output", (dir / "s").string()}), cli::kOk);
    ASSERT_EQ(run_cli({"denoise", "--input", (dir / "s" / "noisy.hyc").string(), "--output",
                       (dir / "den.hyc").string()}),
              cli::kOk);
    ASSERT_EQ(run_cli({"evaluate", "--reference", (dir / "s" / "clean.hyc").string(), "--input",
                       (dir / "s" / "noisy.hyc").string(), "--output", (dir / "noisy.json").string()}),
              cli::kOk);
    ASSERT_EQ(run_cli({"evaluate", "--reference", (dir / "s" / "clean.hyc").string(), "--input",
                       (dir / "den.hyc").string(), "--output", (dir / "den.json").string()}),
              cli::kOk);
    EXPECT_GE(load_json(dir / "den.json")["mpsnr"].get<double>(),
              load_json(dir / "noisy.json")["mpsnr"].get<double>() + 10.0);
}
