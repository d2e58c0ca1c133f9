#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "powrace/cli.hpp"
#include "powrace/rng.hpp"

namespace fs = std::filesystem;
using powrace::kDefaultSeed;

namespace {

int run_cli(const std::vector<std::string>& storage, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
    std::vector<const char*> argv;
    argv.push_back("powrace");
    for (const std::string& arg : storage) argv.push_back(arg.c_str());
    std::ostringstream out, err;
    const int rc = powrace::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

/// Fresh per-test directory under the test working directory; removed on
/// scope exit so reruns start clean.
struct Scratch {
    fs::path dir;

    explicit Scratch(const std::string& name) : dir(fs::path("cli_scratch") / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }

    fs::path file(const std::string& name, const std::string& content) const {
        const fs::path path = dir / name;
        std::ofstream out(path);
        out << content;
        return path;
    }
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("analyze prints the closed-form summary as json") {
    std::string out;
    REQUIRE(run_cli({"analyze"}, &out) == 0);
    const nlohmann::json doc = nlohmann::json::parse(out);
    CHECK(doc.at("q_w").get<double>() == 0.4);
    CHECK(doc.at("sinr_db").get<double>() == 45.0);
    CHECK(doc.at("z").get<int>() == 6);
    CHECK(doc.at("q_c").get<double>() == doctest::Approx(0.18662).epsilon(1e-4));
    CHECK(doc.at("q").get<double>() == doctest::Approx(0.78129).epsilon(1e-4));
    CHECK(doc.at("Q").get<double>() == doctest::Approx(3.5722).epsilon(1e-4));
    CHECK(doc.at("P_z").get<double>() == 1.0);
    CHECK(doc.at("min_attacker_power").get<double>() ==
          doctest::Approx(0.157).epsilon(2e-3));

    SUBCASE("threshold point via overrides") {
        REQUIRE(run_cli({"analyze", "--set", "q_c=1", "--set", "q_w=0.5"}, &out) == 0);
        const nlohmann::json threshold = nlohmann::json::parse(out);
        CHECK(threshold.at("q_c").get<double>() == 1.0);
        CHECK(threshold.at("Q").get<double>() == 1.0);
        CHECK(threshold.at("P_z").get<double>() == 1.0);
        CHECK(threshold.at("min_attacker_power").get<double>() == 0.5);
    }

    SUBCASE("an empty config file changes nothing") {
        Scratch scratch("analyze_empty");
        const fs::path conf = scratch.file("empty.conf", "");
        std::string with_file;
        REQUIRE(run_cli({"analyze", "--config", conf.string()}, &with_file) == 0);
        CHECK(with_file == out);
    }
}

TEST_CASE("flag overrides win over config file values") {
    Scratch scratch("overrides");
    const fs::path conf = scratch.file("point.conf",
                                       "# evaluation point\n"
                                       "q_w = 0.3\n"
                                       "sinr_db = 50\n");
    std::string out;
    REQUIRE(run_cli({"analyze", "--config", conf.string(), "--set", "q_w=0.45"}, &out) ==
            0);
    const nlohmann::json doc = nlohmann::json::parse(out);
    CHECK(doc.at("q_w").get<double>() == 0.45);
    CHECK(doc.at("sinr_db").get<double>() == 50.0);
}

TEST_CASE("config errors exit with code 2 and name the offender") {
    Scratch scratch("config_errors");
    std::string out, err;

    const fs::path range = scratch.file("range.conf", "q_w = 1.5\n");
    CHECK(run_cli({"analyze", "--config", range.string()}, &out, &err) == 2);
    CHECK(err.find("q_w") != std::string::npos);

    const fs::path unknown = scratch.file("unknown.conf", "frobnicate = 3\n");
    CHECK(run_cli({"analyze", "--config", unknown.string()}, &out, &err) == 2);
    CHECK(err.find("unknown key: frobnicate") != std::string::npos);

    const fs::path shapeless = scratch.file("shapeless.conf", "just words\n");
    CHECK(run_cli({"analyze", "--config", shapeless.string()}, &out, &err) == 2);
    CHECK(err.find("line 1") != std::string::npos);

    const fs::path dup = scratch.file("dup.conf", "z = 4\nz = 5\n");
    CHECK(run_cli({"analyze", "--config", dup.string()}, &out, &err) == 2);
    CHECK(err.find("duplicate key: z") != std::string::npos);

    CHECK(run_cli({"analyze", "--config", (scratch.dir / "missing.conf").string()}, &out,
                  &err) == 2);

    CHECK(run_cli({"analyze", "--set", "q_w"}, &out, &err) == 2);
    CHECK(err.find("--set") != std::string::npos);

    CHECK(run_cli({"analyze", "--seed", "0x10", "--set", "master_seed=7"}, &out, &err) ==
          2);
    CHECK(err.find("duplicate key: master_seed") != std::string::npos);

    CHECK(run_cli({"analyze", "--set", "trials=soon"}, &out, &err) == 2);
    CHECK(err.find("trials must be an integer") != std::string::npos);

    CHECK(run_cli({}, &out, &err) == 2); // a subcommand is required
}

TEST_CASE("sweep writes both dataset files and is byte-reproducible") {
    Scratch scratch("sweep");
    const auto args = [&](const std::string& outdir) {
        return std::vector<std::string>{
            "sweep", "-o",   (scratch.dir / outdir).string(),
            "--set", "experiment=success_vs_depth",
            "--set", "points=0.4@60",
            "--set", "z_max=2",
            "--set", "trials=64",
            "--set", "horizon=80"};
    };
    std::string out, err;
    REQUIRE(run_cli(args("first"), &out, &err) == 0);
    const fs::path csv = scratch.dir / "first" / "success_vs_depth.csv";
    const fs::path sidecar = scratch.dir / "first" / "success_vs_depth.json";
    CHECK(out.find("success_vs_depth.csv") != std::string::npos);
    REQUIRE(fs::exists(csv));
    REQUIRE(fs::exists(sidecar));

    const std::string csv_text = slurp(csv);
    CHECK(csv_text.rfind("q_w,sinr_db,z,p_theory,p_empirical\n", 0) == 0);
    CHECK(std::count(csv_text.begin(), csv_text.end(), '\n') == 3); // header + z in {1, 2}

    const nlohmann::json doc = nlohmann::json::parse(slurp(sidecar));
    CHECK(doc.at("tool_version").is_string());
    CHECK(!doc.at("timestamp").get<std::string>().empty());
    CHECK(doc.at("config").at("master_seed").get<std::uint64_t>() == kDefaultSeed);
    CHECK(doc.at("block_delivery").size() == 1);

    REQUIRE(run_cli(args("second")) == 0);
    CHECK(slurp(scratch.dir / "second" / "success_vs_depth.csv") == csv_text);
}

TEST_CASE("simulate writes the ensemble statistics file") {
    Scratch scratch("simulate");
    std::string out;
    REQUIRE(run_cli({"simulate", "-o", scratch.dir.string(), "--set", "q_w=0.3", "--set",
                     "q_c=0.9", "--set", "trials=32", "--set", "horizon=40"},
                    &out) == 0);
    const fs::path path = scratch.dir / "ensemble_stats.json";
    CHECK(out.find("ensemble_stats.json") != std::string::npos);
    REQUIRE(fs::exists(path));
    const nlohmann::json doc = nlohmann::json::parse(slurp(path));
    CHECK(doc.at("q_w").get<double>() == 0.3);
    CHECK(doc.at("q_c").get<double>() == 0.9);
    CHECK(doc.at("trials").get<long>() == 32);
    CHECK(doc.at("cdf_by_round").size() == 41);
    const double p = doc.at("empirical_success_prob").get<double>();
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
}

TEST_CASE("chain demo mines, verifies, and flags the tampered block") {
    std::string out;
    REQUIRE(run_cli({"chain-demo"}, &out) == 0);
    const nlohmann::json doc = nlohmann::json::parse(out);
    CHECK(doc.at("blocks").get<int>() == 5);
    CHECK(doc.at("chain_valid").get<bool>());
    CHECK(doc.at("tamper").at("detected").get<bool>());
    CHECK(doc.at("tamper").at("failed_index").get<int>() == 2);
    CHECK(doc.at("tamper").at("reason").get<std::string>() == "merkle mismatch");
}

TEST_CASE("help enumerates the configuration keys with units") {
    std::string out;
    CHECK(run_cli({"--help"}, &out) == 0);
    for (const char* needle :
         {"analyze", "simulate", "sweep", "chain-demo", "sinr_db", "dB", "bits",
          "master_seed", "0x5EEDB10C", "q_w_grid", "points", "tradeoff_surface"}) {
        INFO("missing from help: ", needle);
        CHECK(out.find(needle) != std::string::npos);
    }
}

TEST_CASE("runtime write failures exit with code 1 and leave no partial files") {
    Scratch scratch("write_failure");
    std::string out, err;

    const fs::path blocked = scratch.file("blocked", "placeholder");
    CHECK(run_cli({"sweep", "-o", blocked.string(), "--set", "points=0.5@60", "--set",
                   "q_c=1", "--set", "trials=4", "--set", "horizon=10"},
                  &out, &err) == 1);

    // sidecar path occupied by a directory: the csv must not survive either
    const fs::path outdir = scratch.dir / "partial";
    fs::create_directories(outdir / "tradeoff_surface.json");
    CHECK(run_cli({"sweep", "-o", outdir.string(), "--set", "points=0.5@60", "--set",
                   "q_c=1", "--set", "trials=4", "--set", "horizon=10"},
                  &out, &err) == 1);
    CHECK(!fs::exists(outdir / "tradeoff_surface.csv"));
}

TEST_CASE("verbose narrates the sweep on standard error") {
    Scratch scratch("verbose");
    std::string out, err;
    REQUIRE(run_cli({"sweep", "-v", "-o", (scratch.dir / "out").string(), "--set",
                     "points=0.5@60", "--set", "q_c=1", "--set", "trials=8", "--set",
                     "horizon=16"},
                    &out, &err) == 0);
    CHECK(err.find("points: 1") != std::string::npos);
    CHECK(err.find("tradeoff_surface") != std::string::npos);
}
