#include "powrace/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace powrace::experiments {
namespace {

double point_q_c(const ExperimentConfig& config, const GridPoint& point) {
    if (config.q_c_override) return *config.q_c_override;
    channel::LinkParams link = config.link;
    link.sinr_db = point.sinr_db;
    return channel::block_delivery_prob(link).block_delivery;
}

race::RaceParams race_params(const ExperimentConfig& config, const GridPoint& point,
                             double q_c, int z) {
    race::RaceParams params;
    params.q_w = point.q_w;
    params.q_c = q_c;
    params.z = z;
    params.horizon = config.horizon;
    params.strict_lead = config.strict_lead;
    return params;
}

/// Overtaking by one block is one more down-step than reaching a tie, so
/// the tie-rule closed forms apply with the deficit shifted by one.
int theory_deficit(const ExperimentConfig& config, int z) {
    return z + (config.strict_lead ? 1 : 0);
}

void require_kind(const ExperimentConfig& config, Kind kind) {
    config.validate();
    if (config.kind != kind) throw std::invalid_argument("experiment kind mismatch");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

const char* fading_name(channel::FadingModel fading) {
    return fading == channel::FadingModel::kFastPerBit ? "fast_per_bit"
                                                       : "block_per_attempt";
}

} // namespace

std::string_view kind_name(Kind kind) {
    switch (kind) {
    case Kind::kTradeoffSurface: return "tradeoff_surface";
    case Kind::kGapTrajectories: return "gap_trajectories";
    case Kind::kAttackCdf: return "attack_cdf";
    case Kind::kSuccessVsDepth: return "success_vs_depth";
    }
    throw std::logic_error("unknown experiment kind");
}

std::optional<Kind> parse_kind(std::string_view name) {
    for (Kind kind : {Kind::kTradeoffSurface, Kind::kGapTrajectories, Kind::kAttackCdf,
                      Kind::kSuccessVsDepth}) {
        if (name == kind_name(kind)) return kind;
    }
    return std::nullopt;
}

void ExperimentConfig::validate() const {
    if (points.empty()) throw std::invalid_argument("grid must not be empty");
    link.validate();
    for (const GridPoint& point : points) {
        if (!(point.q_w >= 0.0 && point.q_w <= 1.0)) {
            throw std::invalid_argument("q_w must be in [0, 1]");
        }
        if (!std::isfinite(point.sinr_db)) {
            throw std::invalid_argument("sinr_db must be a number");
        }
    }
    if (q_c_override && !(*q_c_override >= 0.0 && *q_c_override <= 1.0)) {
        throw std::invalid_argument("q_c must be in [0, 1]");
    }
    if (z < 0) throw std::invalid_argument("z must be nonnegative");
    if (z_min < 0) throw std::invalid_argument("z_min must be nonnegative");
    if (z_max < z_min) throw std::invalid_argument("z_max must be >= z_min");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
}

std::vector<GridPoint> default_grid(Kind kind) {
    switch (kind) {
    case Kind::kTradeoffSurface: {
        std::vector<GridPoint> points;
        for (int i = 0; i <= 16; ++i) {      // q_w 0.10 .. 0.90, step 0.05
            for (int s = 40; s <= 65; ++s) { // SINR 40 .. 65 dB, step 1
                points.push_back({(10 + 5 * i) / 100.0, static_cast<double>(s)});
            }
        }
        return points;
    }
    case Kind::kGapTrajectories:
    case Kind::kAttackCdf:
        return {{0.6, 60.0}, {0.4, 45.0}, {0.4, 60.0}};
    case Kind::kSuccessVsDepth:
        return {{0.4, 45.0}, {0.4, 50.0}, {0.4, 60.0}};
    }
    throw std::logic_error("unknown experiment kind");
}

FigureDataset tradeoff_surface(const ExperimentConfig& config) {
    require_kind(config, Kind::kTradeoffSurface);
    FigureDataset dataset;
    dataset.config = config;
    for (std::size_t i = 0; i < config.points.size(); ++i) {
        const GridPoint& point = config.points[i];
        const double q_c = point_q_c(config, point);
        dataset.reliability.push_back({point.q_w, point.sinr_db, q_c});

        const double advantage = race::advantage_ratio(point.q_w, q_c);
        const double p_theory =
            race::catch_up_probability(point.q_w, q_c, theory_deficit(config, config.z));
        const race::EnsembleStats stats =
            race::run_ensemble(race_params(config, point, q_c, config.z), config.trials,
                               derive_seed(config.master_seed, i));
        dataset.tradeoff.push_back({point.q_w, point.sinr_db, config.link.max_attempts,
                                    q_c, advantage, advantage >= 1.0 ? 'A' : 'B',
                                    p_theory, stats.empirical_success_prob,
                                    config.trials, config.master_seed});
    }
    return dataset;
}

FigureDataset gap_trajectories(const ExperimentConfig& config) {
    require_kind(config, Kind::kGapTrajectories);
    FigureDataset dataset;
    dataset.config = config;
    for (std::size_t i = 0; i < config.points.size(); ++i) {
        const GridPoint& point = config.points[i];
        const double q_c = point_q_c(config, point);
        dataset.reliability.push_back({point.q_w, point.sinr_db, q_c});

        const race::EnsembleStats stats =
            race::run_ensemble(race_params(config, point, q_c, config.z), config.trials,
                               derive_seed(config.master_seed, i));
        for (long r = 0; r <= config.horizon; ++r) {
            const auto at = static_cast<std::size_t>(r);
            dataset.gap.push_back({point.q_w, point.sinr_db, r,
                                   stats.mean_gap_by_round[at],
                                   stats.mean_gap_active_by_round[at],
                                   stats.active_fraction_by_round[at]});
        }
    }
    return dataset;
}

FigureDataset attack_cdf(const ExperimentConfig& config) {
    require_kind(config, Kind::kAttackCdf);
    FigureDataset dataset;
    dataset.config = config;
    for (std::size_t i = 0; i < config.points.size(); ++i) {
        const GridPoint& point = config.points[i];
        const double q_c = point_q_c(config, point);
        dataset.reliability.push_back({point.q_w, point.sinr_db, q_c});

        const double q = race::effective_round_prob(point.q_w, q_c);
        const race::FirstPassage theory =
            race::first_passage_cdf(q, theory_deficit(config, config.z), config.horizon);
        const race::EnsembleStats stats =
            race::run_ensemble(race_params(config, point, q_c, config.z), config.trials,
                               derive_seed(config.master_seed, i));
        for (long r = 0; r <= config.horizon; ++r) {
            const auto at = static_cast<std::size_t>(r);
            dataset.cdf.push_back({point.q_w, point.sinr_db, r, theory.cdf[at],
                                   stats.cdf_by_round[at]});
        }
    }
    return dataset;
}

FigureDataset success_vs_depth(const ExperimentConfig& config) {
    require_kind(config, Kind::kSuccessVsDepth);
    FigureDataset dataset;
    dataset.config = config;
    std::uint64_t run_index = 0;
    for (const GridPoint& point : config.points) {
        const double q_c = point_q_c(config, point);
        dataset.reliability.push_back({point.q_w, point.sinr_db, q_c});

        for (int z = config.z_min; z <= config.z_max; ++z) {
            const double p_theory =
                race::catch_up_probability(point.q_w, q_c, theory_deficit(config, z));
            const race::EnsembleStats stats =
                race::run_ensemble(race_params(config, point, q_c, z), config.trials,
                                   derive_seed(config.master_seed, run_index++));
            dataset.depth.push_back({point.q_w, point.sinr_db, z, p_theory,
                                     stats.empirical_success_prob});
        }
    }
    return dataset;
}

FigureDataset run_experiment(const ExperimentConfig& config) {
    switch (config.kind) {
    case Kind::kTradeoffSurface: return tradeoff_surface(config);
    case Kind::kGapTrajectories: return gap_trajectories(config);
    case Kind::kAttackCdf: return attack_cdf(config);
    case Kind::kSuccessVsDepth: return success_vs_depth(config);
    }
    throw std::logic_error("unknown experiment kind");
}

void write_csv(const FigureDataset& dataset, std::ostream& out) {
    switch (dataset.config.kind) {
    case Kind::kTradeoffSurface:
        out << "q_w,sinr_db,max_attempts,q_c,Q,region,p_theory,p_empirical,trials,"
               "master_seed\n";
        for (const TradeoffRow& row : dataset.tradeoff) {
            out << fmt(row.q_w) << ',' << fmt(row.sinr_db) << ',' << row.max_attempts
                << ',' << fmt(row.q_c) << ',' << fmt(row.advantage) << ',' << row.region
                << ',' << fmt(row.p_theory) << ',' << fmt(row.p_empirical) << ','
                << row.trials << ',' << row.master_seed << '\n';
        }
        return;
    case Kind::kGapTrajectories:
        out << "q_w,sinr_db,round,mean_gap,mean_gap_active,active_fraction\n";
        for (const GapRow& row : dataset.gap) {
            out << fmt(row.q_w) << ',' << fmt(row.sinr_db) << ',' << row.round << ','
                << fmt(row.mean_gap) << ',' << fmt(row.mean_gap_active) << ','
                << fmt(row.active_fraction) << '\n';
        }
        return;
    case Kind::kAttackCdf:
        out << "q_w,sinr_db,round,cdf_theory,cdf_empirical\n";
        for (const CdfRow& row : dataset.cdf) {
            out << fmt(row.q_w) << ',' << fmt(row.sinr_db) << ',' << row.round << ','
                << fmt(row.cdf_theory) << ',' << fmt(row.cdf_empirical) << '\n';
        }
        return;
    case Kind::kSuccessVsDepth:
        out << "q_w,sinr_db,z,p_theory,p_empirical\n";
        for (const DepthRow& row : dataset.depth) {
            out << fmt(row.q_w) << ',' << fmt(row.sinr_db) << ',' << row.z << ','
                << fmt(row.p_theory) << ',' << fmt(row.p_empirical) << '\n';
        }
        return;
    }
    throw std::logic_error("unknown experiment kind");
}

std::string csv_string(const FigureDataset& dataset) {
    std::ostringstream out;
    write_csv(dataset, out);
    return out.str();
}

void write_sidecar(const FigureDataset& dataset, std::ostream& out,
                   std::string_view timestamp) {
    const ExperimentConfig& config = dataset.config;
    nlohmann::ordered_json doc;
    doc["tool_version"] = kToolVersion;
    doc["timestamp"] = timestamp;

    nlohmann::ordered_json echo;
    echo["experiment"] = kind_name(config.kind);
    echo["points"] = nlohmann::ordered_json::array();
    for (const GridPoint& point : config.points) {
        echo["points"].push_back({{"q_w", point.q_w}, {"sinr_db", point.sinr_db}});
    }
    echo["link"] = {{"rayleigh_scale", config.link.rayleigh_scale},
                    {"bits_per_packet", config.link.bits_per_packet},
                    {"packets_per_block", config.link.packets_per_block},
                    {"max_attempts", config.link.max_attempts},
                    {"fading", fading_name(config.link.fading)}};
    if (config.q_c_override) {
        echo["q_c"] = *config.q_c_override;
    }
    echo["z"] = config.z;
    if (config.kind == Kind::kSuccessVsDepth) {
        echo["z_min"] = config.z_min;
        echo["z_max"] = config.z_max;
    }
    echo["trials"] = config.trials;
    echo["horizon"] = config.horizon;
    echo["strict_lead"] = config.strict_lead;
    echo["master_seed"] = config.master_seed;
    doc["config"] = std::move(echo);

    doc["block_delivery"] = nlohmann::ordered_json::array();
    for (const PointReliability& point : dataset.reliability) {
        doc["block_delivery"].push_back(
            {{"q_w", point.q_w}, {"sinr_db", point.sinr_db}, {"q_c", point.q_c}});
    }
    out << doc.dump(2) << '\n';
}

std::string sidecar_string(const FigureDataset& dataset, std::string_view timestamp) {
    std::ostringstream out;
    write_sidecar(dataset, out, timestamp);
    return out.str();
}

} // namespace powrace::experiments
