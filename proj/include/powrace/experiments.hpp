#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "powrace/channel.hpp"
#include "powrace/race.hpp"

namespace powrace::experiments {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum class Kind {
    kTradeoffSurface, // P(z) over a (q_w, sinr) grid with region labels
    kGapTrajectories, // mean deficit per effective round
    kAttackCdf,       // absorption CDF per round, theory next to empirical
    kSuccessVsDepth,  // P(z) as the confirmation depth varies
};

std::string_view kind_name(Kind kind);
std::optional<Kind> parse_kind(std::string_view name);

struct GridPoint {
    double q_w = 0.4;
    double sinr_db = 45.0;
};

/// Declarative description of one dataset run. Evaluation order over
/// `points` (and over z for the depth sweep) fixes the row order and the
/// per-row seed derivation, so a config is a complete reproduction recipe.
struct ExperimentConfig {
    Kind kind = Kind::kTradeoffSurface;
    std::vector<GridPoint> points;
    channel::LinkParams link; // sinr_db is taken from each point instead
    /// Fix q_c directly, bypassing the channel model (threshold studies).
    std::optional<double> q_c_override;
    int z = 6;
    int z_min = 1; // success-vs-depth range, inclusive
    int z_max = 12;
    long trials = 1000;
    long horizon = 1000;
    bool strict_lead = false;
    std::uint64_t master_seed = kDefaultSeed;

    void validate() const; // throws std::invalid_argument naming the field
};

/// Default evaluation points per kind; the full grid for the surface,
/// representative contrast points for the series experiments.
std::vector<GridPoint> default_grid(Kind kind);

struct TradeoffRow {
    double q_w = 0.0;
    double sinr_db = 0.0;
    int max_attempts = 0;
    double q_c = 0.0;
    double advantage = 0.0; // Q
    char region = 'B';      // 'A': catch-up certain, 'B': P = Q^z
    double p_theory = 0.0;
    double p_empirical = 0.0;
    long trials = 0;
    std::uint64_t master_seed = 0;
};

struct GapRow {
    double q_w = 0.0;
    double sinr_db = 0.0;
    long round = 0;
    double mean_gap = 0.0;
    double mean_gap_active = 0.0;
    double active_fraction = 0.0;
};

struct CdfRow {
    double q_w = 0.0;
    double sinr_db = 0.0;
    long round = 0;
    double cdf_theory = 0.0;
    double cdf_empirical = 0.0;
};

struct DepthRow {
    double q_w = 0.0;
    double sinr_db = 0.0;
    int z = 0;
    double p_theory = 0.0;
    double p_empirical = 0.0;
};

/// Block-delivery probability at one grid point, echoed in the sidecar so
/// every dataset can be replotted without rerunning the channel model.
struct PointReliability {
    double q_w = 0.0;
    double sinr_db = 0.0;
    double q_c = 0.0;
};

struct FigureDataset {
    ExperimentConfig config; // provenance echo
    std::vector<TradeoffRow> tradeoff;
    std::vector<GapRow> gap;
    std::vector<CdfRow> cdf;
    std::vector<DepthRow> depth;
    std::vector<PointReliability> reliability;
};

FigureDataset tradeoff_surface(const ExperimentConfig& config);
FigureDataset gap_trajectories(const ExperimentConfig& config);
FigureDataset attack_cdf(const ExperimentConfig& config);
FigureDataset success_vs_depth(const ExperimentConfig& config);

/// Dispatch on config.kind.
FigureDataset run_experiment(const ExperimentConfig& config);

/// Rows as CSV with a header line. Numeric formatting is fixed (12
/// significant digits), so equal datasets serialize to identical bytes.
void write_csv(const FigureDataset& dataset, std::ostream& out);
std::string csv_string(const FigureDataset& dataset);

/// JSON provenance sidecar: tool version, caller-supplied timestamp, the
/// full config echo, and q_c per grid point at round-trip precision.
void write_sidecar(const FigureDataset& dataset, std::ostream& out,
                   std::string_view timestamp);
std::string sidecar_string(const FigureDataset& dataset, std::string_view timestamp);

} // namespace powrace::experiments
