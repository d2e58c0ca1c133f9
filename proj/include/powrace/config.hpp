#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "powrace/experiments.hpp"

namespace powrace::config {

/// Raised for malformed or out-of-contract configuration input; the message
/// names the offending key or line.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One parsed key-value document (or one batch of flag overrides): every
/// field is optional so that several layers can be merged before defaults
/// are filled in.
struct Settings {
    std::optional<double> q_w;
    std::optional<double> sinr_db;
    std::optional<double> rayleigh_scale;
    std::optional<double> q_c;
    std::optional<long> bits_per_packet;
    std::optional<long> packets_per_block;
    std::optional<int> max_attempts;
    std::optional<channel::FadingModel> fading;
    std::optional<int> z;
    std::optional<int> z_min;
    std::optional<int> z_max;
    std::optional<long> trials;
    std::optional<long> horizon;
    std::optional<bool> strict_lead;
    std::optional<std::uint64_t> master_seed;
    std::optional<experiments::Kind> experiment;
    std::optional<std::vector<double>> q_w_grid;
    std::optional<std::vector<double>> sinr_grid;
    std::optional<std::vector<experiments::GridPoint>> points;
};

/// Applies one key = value pair. `seen` tracks keys already applied to this
/// Settings so repeats are rejected rather than silently last-wins.
void apply_setting(Settings& settings, const std::string& key,
                   const std::string& value, std::set<std::string>& seen);

/// Flat key = value document: one pair per line, '#' starts a comment line,
/// blank lines ignored. Unknown and duplicate keys are errors.
Settings parse_settings(std::istream& in);
Settings parse_settings_file(const std::string& path); // missing file → ConfigError

/// Fields present in `overrides` replace those in `base`.
void merge_overrides(Settings& base, const Settings& overrides);

/// Fills documented defaults and resolves the evaluation grid:
/// an explicit `points` list wins; otherwise `q_w_grid` x `sinr_grid`
/// (scalars standing in for a missing axis); otherwise the scalar point;
/// otherwise the per-experiment default grid. Validates before returning.
experiments::ExperimentConfig to_experiment_config(const Settings& settings);

} // namespace powrace::config
