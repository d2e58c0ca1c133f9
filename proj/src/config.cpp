#include "powrace/config.hpp"

#include <climits>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace powrace::config {
namespace {

std::string trim(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string::size_type pos = 0;
    while (true) {
        const auto next = text.find(sep, pos);
        if (next == std::string::npos) {
            parts.push_back(trim(text.substr(pos)));
            return parts;
        }
        parts.push_back(trim(text.substr(pos, next - pos)));
        pos = next + 1;
    }
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double value = std::stod(text, &pos);
        if (pos != text.size()) throw ConfigError("");
        return value;
    } catch (...) {
        throw ConfigError(key + " must be a number");
    }
}

long parse_long(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const long value = std::stol(text, &pos);
        if (pos != text.size()) throw ConfigError("");
        return value;
    } catch (...) {
        throw ConfigError(key + " must be an integer");
    }
}

int parse_int(const std::string& key, const std::string& text) {
    const long value = parse_long(key, text);
    if (value < INT_MIN || value > INT_MAX) throw ConfigError(key + " must be an integer");
    return static_cast<int>(value);
}

std::uint64_t parse_seed(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const unsigned long long value = std::stoull(text, &pos, 0); // 0x accepted
        if (pos != text.size() || text.front() == '-') throw ConfigError("");
        return value;
    } catch (...) {
        throw ConfigError(key + " must be a 64-bit unsigned integer");
    }
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw ConfigError(key + " must be true or false");
}

channel::FadingModel parse_fading(const std::string& key, const std::string& text) {
    if (text == "fast_per_bit") return channel::FadingModel::kFastPerBit;
    if (text == "block_per_attempt") return channel::FadingModel::kBlockPerAttempt;
    throw ConfigError(key + " must be fast_per_bit or block_per_attempt");
}

experiments::Kind parse_experiment(const std::string& key, const std::string& text) {
    const auto kind = experiments::parse_kind(text);
    if (!kind) {
        throw ConfigError(key +
                          " must be one of tradeoff_surface, gap_trajectories, "
                          "attack_cdf, success_vs_depth");
    }
    return *kind;
}

/// Axis values: either an explicit comma list or an inclusive
/// start:stop:step range.
std::vector<double> parse_axis(const std::string& key, const std::string& text) {
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw ConfigError(key + " range must be start:stop:step");
        const double start = parse_double(key, parts[0]);
        const double stop = parse_double(key, parts[1]);
        const double step = parse_double(key, parts[2]);
        if (!(step > 0.0)) throw ConfigError(key + " step must be positive");
        if (stop < start) throw ConfigError(key + " range must be nondecreasing");
        const long count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) {
            values.push_back(start + static_cast<double>(i) * step);
        }
        return values;
    }
    for (const std::string& part : split(text, ',')) {
        if (part.empty()) throw ConfigError(key + " must not contain empty entries");
        values.push_back(parse_double(key, part));
    }
    return values;
}

std::vector<experiments::GridPoint> parse_points(const std::string& key,
                                                 const std::string& text) {
    std::vector<experiments::GridPoint> points;
    for (const std::string& part : split(text, ',')) {
        const auto at = part.find('@');
        if (part.empty() || at == std::string::npos) {
            throw ConfigError(key + " must be a comma list of q_w@sinr_db pairs");
        }
        points.push_back({parse_double(key, trim(part.substr(0, at))),
                          parse_double(key, trim(part.substr(at + 1)))});
    }
    return points;
}

} // namespace

void apply_setting(Settings& settings, const std::string& key, const std::string& value,
                   std::set<std::string>& seen) {
    if (!seen.insert(key).second) throw ConfigError("duplicate key: " + key);
    if (key == "q_w") settings.q_w = parse_double(key, value);
    else if (key == "sinr_db") settings.sinr_db = parse_double(key, value);
    else if (key == "rayleigh_scale") settings.rayleigh_scale = parse_double(key, value);
    else if (key == "q_c") settings.q_c = parse_double(key, value);
    else if (key == "bits_per_packet") settings.bits_per_packet = parse_long(key, value);
    else if (key == "packets_per_block") settings.packets_per_block = parse_long(key, value);
    else if (key == "max_attempts") settings.max_attempts = parse_int(key, value);
    else if (key == "fading") settings.fading = parse_fading(key, value);
    else if (key == "z") settings.z = parse_int(key, value);
    else if (key == "z_min") settings.z_min = parse_int(key, value);
    else if (key == "z_max") settings.z_max = parse_int(key, value);
    else if (key == "trials") settings.trials = parse_long(key, value);
    else if (key == "horizon") settings.horizon = parse_long(key, value);
    else if (key == "strict_lead") settings.strict_lead = parse_bool(key, value);
    else if (key == "master_seed") settings.master_seed = parse_seed(key, value);
    else if (key == "experiment") settings.experiment = parse_experiment(key, value);
    else if (key == "q_w_grid") settings.q_w_grid = parse_axis(key, value);
    else if (key == "sinr_grid") settings.sinr_grid = parse_axis(key, value);
    else if (key == "points") settings.points = parse_points(key, value);
    else throw ConfigError("unknown key: " + key);
}

Settings parse_settings(std::istream& in) {
    Settings settings;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        apply_setting(settings, key, trim(stripped.substr(eq + 1)), seen);
    }
    return settings;
}

Settings parse_settings_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_settings(in);
}

void merge_overrides(Settings& base, const Settings& overrides) {
    const auto take = [](auto& dst, const auto& src) {
        if (src) dst = src;
    };
    take(base.q_w, overrides.q_w);
    take(base.sinr_db, overrides.sinr_db);
    take(base.rayleigh_scale, overrides.rayleigh_scale);
    take(base.q_c, overrides.q_c);
    take(base.bits_per_packet, overrides.bits_per_packet);
    take(base.packets_per_block, overrides.packets_per_block);
    take(base.max_attempts, overrides.max_attempts);
    take(base.fading, overrides.fading);
    take(base.z, overrides.z);
    take(base.z_min, overrides.z_min);
    take(base.z_max, overrides.z_max);
    take(base.trials, overrides.trials);
    take(base.horizon, overrides.horizon);
    take(base.strict_lead, overrides.strict_lead);
    take(base.master_seed, overrides.master_seed);
    take(base.experiment, overrides.experiment);
    take(base.q_w_grid, overrides.q_w_grid);
    take(base.sinr_grid, overrides.sinr_grid);
    take(base.points, overrides.points);
}

experiments::ExperimentConfig to_experiment_config(const Settings& settings) {
    experiments::ExperimentConfig config;
    config.kind = settings.experiment.value_or(experiments::Kind::kTradeoffSurface);
    config.link.sinr_db = settings.sinr_db.value_or(45.0);
    config.link.rayleigh_scale = settings.rayleigh_scale.value_or(0.5);
    config.link.bits_per_packet = settings.bits_per_packet.value_or(8000);
    config.link.packets_per_block = settings.packets_per_block.value_or(1000);
    config.link.max_attempts = settings.max_attempts.value_or(3);
    config.link.fading = settings.fading.value_or(channel::FadingModel::kFastPerBit);
    config.q_c_override = settings.q_c;
    config.z = settings.z.value_or(6);
    config.z_min = settings.z_min.value_or(1);
    config.z_max = settings.z_max.value_or(12);
    config.trials = settings.trials.value_or(1000);
    config.horizon = settings.horizon.value_or(1000);
    config.strict_lead = settings.strict_lead.value_or(false);
    config.master_seed = settings.master_seed.value_or(kDefaultSeed);

    if (settings.points) {
        config.points = *settings.points;
    } else if (settings.q_w_grid || settings.sinr_grid) {
        const std::vector<double> q_ws =
            settings.q_w_grid.value_or(std::vector<double>{settings.q_w.value_or(0.4)});
        const std::vector<double> sinrs = settings.sinr_grid.value_or(
            std::vector<double>{settings.sinr_db.value_or(45.0)});
        for (double q_w : q_ws) {
            for (double sinr : sinrs) config.points.push_back({q_w, sinr});
        }
    } else if (settings.q_w || settings.sinr_db) {
        config.points = {{settings.q_w.value_or(0.4), settings.sinr_db.value_or(45.0)}};
    } else {
        config.points = experiments::default_grid(config.kind);
    }

    config.validate();
    return config;
}

} // namespace powrace::config
