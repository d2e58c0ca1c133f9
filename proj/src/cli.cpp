#include "powrace/cli.hpp"

#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "powrace/config.hpp"
#include "powrace/ledger.hpp"

namespace powrace::cli {
namespace {

namespace fs = std::filesystem;
using config::ConfigError;
using config::Settings;

constexpr const char* kKeyHelp = R"(Configuration keys (for --config files and --set overrides):
  experiment         tradeoff_surface | gap_trajectories | attack_cdf | success_vs_depth
  q_w                attacker share of total mining power, in [0, 1] (default 0.4)
  sinr_db            average link SINR in dB (default 45)
  q_c                fix the block-delivery probability in [0, 1] directly,
                     bypassing the channel model
  rayleigh_scale     Rayleigh fading scale sigma (default 0.5)
  bits_per_packet    packet size in bits (default 8000)
  packets_per_block  packets per block (default 1000)
  max_attempts       transmission attempts per packet (default 3)
  fading             fast_per_bit | block_per_attempt (default fast_per_bit)
  z                  confirmation depth the attacker starts behind (default 6)
  z_min, z_max       depth range for success_vs_depth (defaults 1, 12)
  trials             Monte-Carlo trials per grid point (default 1000)
  horizon            cap on effective rounds per trial (default 1000)
  strict_lead        true to require a strictly longer attacker chain (default false)
  master_seed        64-bit seed, decimal or 0x-hex (default 0x5EEDB10C)
  q_w_grid           q_w axis: comma list or start:stop:step (e.g. 0.1:0.9:0.05)
  sinr_grid          SINR axis in dB: comma list or start:stop:step (e.g. 40:65:1)
  points             explicit q_w@sinr_db pairs, comma separated (e.g. 0.4@45,0.6@60)

Without grid keys, sweeps run the per-experiment default grid; analyze and
simulate always use the single point (q_w, sinr_db). Runs are reproducible:
nothing is seeded from the wall clock. Sweep datasets land in --output-dir
as <experiment>.csv plus a <experiment>.json provenance sidecar.)";

std::string trimmed(const std::string& text) {
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string::npos) return "";
    const auto last = text.find_last_not_of(" \t");
    return text.substr(first, last - first + 1);
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct CommonOptions {
    std::string config_path;
    std::string output_dir = ".";
    std::vector<std::string> overrides;
    std::string seed_text;
    bool verbose = false;
};

Settings gather_settings(const CommonOptions& opts) {
    Settings settings;
    if (!opts.config_path.empty()) {
        settings = config::parse_settings_file(opts.config_path);
    }
    Settings flags;
    std::set<std::string> seen;
    for (const std::string& item : opts.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set expects KEY=VALUE, got: " + item);
        }
        config::apply_setting(flags, trimmed(item.substr(0, eq)),
                              trimmed(item.substr(eq + 1)), seen);
    }
    if (!opts.seed_text.empty()) {
        config::apply_setting(flags, "master_seed", opts.seed_text, seen);
    }
    config::merge_overrides(settings, flags);
    return settings;
}

/// analyze and simulate ignore grid keys: they always evaluate the single
/// scalar point.
experiments::ExperimentConfig point_config(Settings settings) {
    settings.points = std::vector<experiments::GridPoint>{
        {settings.q_w.value_or(0.4), settings.sinr_db.value_or(45.0)}};
    settings.q_w_grid.reset();
    settings.sinr_grid.reset();
    return config::to_experiment_config(settings);
}

double resolve_q_c(const experiments::ExperimentConfig& config) {
    if (config.q_c_override) return *config.q_c_override;
    channel::LinkParams link = config.link;
    link.sinr_db = config.points[0].sinr_db;
    return channel::block_delivery_prob(link).block_delivery;
}

nlohmann::ordered_json finite_or_text(double value) {
    if (std::isfinite(value)) return value;
    return value > 0 ? "infinity" : "-infinity";
}

int do_analyze(const CommonOptions& opts, std::ostream& out) {
    const auto config = point_config(gather_settings(opts));
    const experiments::GridPoint point = config.points[0];
    const double q_c = resolve_q_c(config);
    const int deficit = config.z + (config.strict_lead ? 1 : 0);

    nlohmann::ordered_json doc;
    doc["q_w"] = point.q_w;
    doc["sinr_db"] = point.sinr_db;
    doc["z"] = config.z;
    doc["q_c"] = q_c;
    doc["q"] = race::effective_round_prob(point.q_w, q_c);
    doc["Q"] = finite_or_text(race::advantage_ratio(point.q_w, q_c));
    doc["P_z"] = race::catch_up_probability(point.q_w, q_c, deficit);
    doc["min_attacker_power"] = race::min_attacker_power(q_c, config.z, 1.0);
    out << doc.dump(2) << '\n';
    return 0;
}

int do_simulate(const CommonOptions& opts, std::ostream& out) {
    const auto config = point_config(gather_settings(opts));
    const experiments::GridPoint point = config.points[0];
    const double q_c = resolve_q_c(config);
    race::RaceParams params;
    params.q_w = point.q_w;
    params.q_c = q_c;
    params.z = config.z;
    params.horizon = config.horizon;
    params.strict_lead = config.strict_lead;
    const race::EnsembleStats stats =
        race::run_ensemble(params, config.trials, config.master_seed);

    nlohmann::ordered_json doc;
    doc["tool_version"] = experiments::kToolVersion;
    doc["timestamp"] = utc_timestamp();
    doc["q_w"] = point.q_w;
    doc["sinr_db"] = point.sinr_db;
    doc["q_c"] = q_c;
    doc["z"] = config.z;
    doc["strict_lead"] = config.strict_lead;
    doc["trials"] = config.trials;
    doc["horizon"] = config.horizon;
    doc["master_seed"] = config.master_seed;
    doc["empirical_success_prob"] = stats.empirical_success_prob;
    doc["cdf_by_round"] = stats.cdf_by_round;
    doc["mean_gap_by_round"] = stats.mean_gap_by_round;
    doc["mean_gap_active_by_round"] = stats.mean_gap_active_by_round;
    doc["active_fraction_by_round"] = stats.active_fraction_by_round;

    fs::create_directories(opts.output_dir);
    const fs::path path = fs::path(opts.output_dir) / "ensemble_stats.json";
    try {
        std::ofstream file(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open " + path.string());
        file << doc.dump(2) << '\n';
        file.flush();
        if (!file) throw std::runtime_error("write failed: " + path.string());
    } catch (...) {
        std::error_code ec;
        fs::remove(path, ec);
        throw;
    }
    out << path.string() << '\n';
    return 0;
}

int do_sweep(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    const auto config = config::to_experiment_config(gather_settings(opts));
    if (opts.verbose) {
        err << "experiment: " << experiments::kind_name(config.kind)
            << ", points: " << config.points.size() << ", trials: " << config.trials
            << '\n';
    }
    const experiments::FigureDataset dataset = experiments::run_experiment(config);

    fs::create_directories(opts.output_dir);
    const std::string stem{experiments::kind_name(config.kind)};
    const fs::path csv_path = fs::path(opts.output_dir) / (stem + ".csv");
    const fs::path json_path = fs::path(opts.output_dir) / (stem + ".json");
    try {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot open " + csv_path.string());
        experiments::write_csv(dataset, csv);
        csv.flush();
        if (!csv) throw std::runtime_error("write failed: " + csv_path.string());

        std::ofstream sidecar(json_path, std::ios::binary);
        if (!sidecar) throw std::runtime_error("cannot open " + json_path.string());
        experiments::write_sidecar(dataset, sidecar, utc_timestamp());
        sidecar.flush();
        if (!sidecar) throw std::runtime_error("write failed: " + json_path.string());
    } catch (...) {
        // never leave a partial dataset behind
        std::error_code ec;
        fs::remove(csv_path, ec);
        fs::remove(json_path, ec);
        throw;
    }
    out << csv_path.string() << '\n' << json_path.string() << '\n';
    return 0;
}

ledger::Transaction make_tx(std::string_view text) {
    return {Bytes(text.begin(), text.end())};
}

int do_chain_demo(std::ostream& out) {
    const ledger::Target target = ledger::pow2_target(248);
    ledger::Chain chain = ledger::make_chain(target);
    const char* recipients[] = {"alpha", "bravo", "charlie", "delta"};
    for (std::uint64_t i = 0; i < 4; ++i) {
        std::vector<ledger::Transaction> txs;
        txs.push_back(make_tx("credit 10 to " + std::string(recipients[i])));
        txs.push_back(make_tx("fee 1"));
        ledger::Block block =
            ledger::mine_block(ledger::header_hash(chain.blocks.back().header),
                               std::move(txs), target, i + 1);
        if (!ledger::append_block(chain, std::move(block))) {
            throw std::runtime_error("demo chain rejected its own block");
        }
    }
    const ledger::ChainValidation clean = ledger::validate_chain(chain);

    ledger::Chain tampered = chain;
    tampered.blocks[2].transactions[0].payload[0] ^= 0x01;
    const ledger::ChainValidation verdict = ledger::validate_chain(tampered);

    nlohmann::ordered_json doc;
    doc["blocks"] = chain.blocks.size();
    doc["target_bit"] = 248;
    doc["chain_valid"] = clean.ok;
    doc["tamper"] = {{"block", 2},
                     {"byte", 0},
                     {"detected", !verdict.ok},
                     {"failed_index", verdict.failed_index},
                     {"reason", ledger::reject_reason_text(verdict.reason)}};
    out << doc.dump(2) << '\n';
    return clean.ok && !verdict.ok ? 0 : 1;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{
        "Wireless reliability vs mining power in proof-of-work security: "
        "closed-form analysis, Monte-Carlo race simulation, dataset emission, "
        "and a hash-chain tamper demo."};
    app.require_subcommand(1);
    app.footer(kKeyHelp);

    CommonOptions opts;
    app.add_option("--config", opts.config_path, "flat key = value configuration file");
    app.add_option("-o,--output-dir", opts.output_dir, "directory for emitted files")
        ->capture_default_str();
    app.add_option("--set", opts.overrides,
                   "KEY=VALUE override, repeatable; wins over --config");
    app.add_option("--seed", opts.seed_text, "master seed override (decimal or 0x-hex)");
    app.add_flag("-v,--verbose", opts.verbose, "progress notes on standard error");

    CLI::App* analyze = app.add_subcommand(
        "analyze", "print the closed-form attack analysis of one point as JSON");
    CLI::App* simulate = app.add_subcommand(
        "simulate", "run one race ensemble and write its statistics as JSON");
    CLI::App* sweep = app.add_subcommand(
        "sweep", "run an experiment over a grid and write CSV + sidecar datasets");
    CLI::App* chain_demo = app.add_subcommand(
        "chain-demo", "mine a small chain and show single-byte tamper detection");
    for (CLI::App* sub : {analyze, simulate, sweep, chain_demo}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (app.got_subcommand(analyze)) return do_analyze(opts, out);
        if (app.got_subcommand(simulate)) return do_simulate(opts, out);
        if (app.got_subcommand(sweep)) return do_sweep(opts, out, err);
        return do_chain_demo(out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace powrace::cli
