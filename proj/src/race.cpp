#include "powrace/race.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

namespace powrace::race {
namespace {

bool valid_prob(double p) { return p >= 0.0 && p <= 1.0; }

/// Probability that a round changes the public chain state at all.
double effective_rate(double q_w, double q_c) {
    return q_w + (1.0 - q_w) * q_c;
}

struct Accumulators {
    long long success_count = 0;
    std::vector<long long> success_by_round; // absorption counts per round
    std::vector<long long> gap_sum;          // summed deficit per round, absorbed = 0

    explicit Accumulators(long horizon)
        : success_by_round(static_cast<std::size_t>(horizon) + 1, 0),
          gap_sum(static_cast<std::size_t>(horizon) + 1, 0) {}

    void add(const RaceParams& params, const TrialResult& trial) {
        const auto horizon = static_cast<std::size_t>(params.horizon);
        if (trial.success) {
            ++success_count;
            ++success_by_round[static_cast<std::size_t>(*trial.success_round)];
        }
        gap_sum[0] += params.z;
        const std::size_t rounds = std::min(horizon, trial.gap_trajectory.size());
        for (std::size_t r = 1; r <= rounds; ++r) {
            gap_sum[r] += trial.gap_trajectory[r - 1];
        }
        // beyond a successful trajectory the deficit stays 0
    }

    void merge(const Accumulators& other) {
        success_count += other.success_count;
        for (std::size_t i = 0; i < success_by_round.size(); ++i) {
            success_by_round[i] += other.success_by_round[i];
            gap_sum[i] += other.gap_sum[i];
        }
    }
};

Accumulators run_range(const RaceParams& params, long begin, long end,
                       std::uint64_t master_seed) {
    Accumulators acc(params.horizon);
    for (long t = begin; t < end; ++t) {
        RandomStream rng = RandomStream::substream(master_seed, static_cast<std::uint64_t>(t));
        acc.add(params, run_trial(params, rng));
    }
    return acc;
}

} // namespace

void RaceParams::validate() const {
    if (!valid_prob(q_w)) throw std::invalid_argument("q_w must be in [0, 1]");
    if (!valid_prob(q_c)) throw std::invalid_argument("q_c must be in [0, 1]");
    if (z < 0) throw std::invalid_argument("z must be nonnegative");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (effective_rate(q_w, q_c) < 1e-12) throw std::invalid_argument("degenerate race");
}

double effective_round_prob(double q_w, double q_c) {
    if (!valid_prob(q_w) || !valid_prob(q_c)) {
        throw std::invalid_argument("probabilities must be in [0, 1]");
    }
    const double denom = effective_rate(q_w, q_c);
    if (denom <= 0.0) throw std::invalid_argument("degenerate race");
    return q_w / denom;
}

double advantage_ratio(double q_w, double q_c) {
    if (!valid_prob(q_w) || !valid_prob(q_c)) {
        throw std::invalid_argument("probabilities must be in [0, 1]");
    }
    if (q_w >= 1.0 || q_c <= 0.0) {
        if (q_w == 0.0) return 0.0; // no mining power, no race
        return std::numeric_limits<double>::infinity();
    }
    return q_w / ((1.0 - q_w) * q_c);
}

double catch_up_probability(double q_w, double q_c, int z) {
    if (z < 0) throw std::invalid_argument("z must be nonnegative");
    if (z == 0) return 1.0;
    const double ratio = advantage_ratio(q_w, q_c);
    if (ratio >= 1.0) return 1.0;
    return std::pow(ratio, static_cast<double>(z));
}

double min_attacker_power(double q_c, int z, double target_prob) {
    if (!(q_c > 0.0) || q_c > 1.0) throw std::invalid_argument("q_c must be in (0, 1]");
    if (z < 1) throw std::invalid_argument("z must be positive");
    if (!(target_prob > 0.0)) throw std::invalid_argument("vacuous target");
    if (target_prob > 1.0) throw std::invalid_argument("target_prob must be in (0, 1]");

    const double q_star =
        target_prob == 1.0 ? 1.0 : std::pow(target_prob, 1.0 / static_cast<double>(z));
    double q_w = q_star * q_c / (1.0 + q_star * q_c);

    // Trim to the smallest double that still meets the target.
    for (int i = 0; i < 64 && catch_up_probability(q_w, q_c, z) < target_prob; ++i) {
        q_w = std::nextafter(q_w, 1.0);
    }
    for (int i = 0; i < 64; ++i) {
        const double lower = std::nextafter(q_w, 0.0);
        if (catch_up_probability(lower, q_c, z) < target_prob) break;
        q_w = lower;
    }
    return q_w;
}

double aggregate_shares(std::span<const double> shares) {
    double total = 0.0;
    for (double s : shares) {
        if (!valid_prob(s)) throw std::invalid_argument("share must be in [0, 1]");
        total += s;
    }
    if (total > 1.0 + 1e-12) throw std::invalid_argument("shares exceed total power");
    return std::min(total, 1.0);
}

RoundOutcome sample_round(const RaceParams& params, RandomStream& rng) {
    const double u = rng.uniform();
    if (u < params.q_w) return RoundOutcome::kAttackerWin;
    if (u < params.q_w + (1.0 - params.q_w) * params.q_c) {
        return RoundOutcome::kHonestWinDelivered;
    }
    return RoundOutcome::kHonestWinLost;
}

TrialResult run_trial(const RaceParams& params, RandomStream& rng) {
    params.validate();
    const int goal = params.strict_lead ? -1 : 0;

    TrialResult result;
    int deficit = params.z;
    if (deficit == goal) {
        result.success = true;
        result.success_round = 0;
        return result;
    }
    result.gap_trajectory.reserve(static_cast<std::size_t>(params.horizon));

    long effective = 0;
    while (effective < params.horizon) {
        ++result.raw_rounds;
        switch (sample_round(params, rng)) {
            case RoundOutcome::kAttackerWin:
                --deficit;
                break;
            case RoundOutcome::kHonestWinDelivered:
                ++deficit;
                break;
            case RoundOutcome::kHonestWinLost:
                ++result.orphaned_blocks; // orphaned: deficit and round index unchanged
                continue;
        }
        ++effective;
        result.gap_trajectory.push_back(deficit);
        if (deficit == goal) {
            result.success = true;
            result.success_round = effective;
            break;
        }
    }
    return result;
}

EnsembleStats run_ensemble(const RaceParams& params, long trials,
                           std::uint64_t master_seed, int threads) {
    params.validate();
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");

    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) threads = 1;
    }
    constexpr long kMinTrialsPerThread = 512;
    threads = static_cast<int>(
        std::clamp<long>(trials / kMinTrialsPerThread, 1, static_cast<long>(threads)));

    Accumulators total(params.horizon);
    if (threads == 1) {
        total = run_range(params, 0, trials, master_seed);
    } else {
        std::vector<std::future<Accumulators>> futures;
        const long chunk = (trials + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const long begin = t * chunk;
            const long end = std::min(trials, begin + chunk);
            if (begin >= end) break;
            futures.push_back(std::async(std::launch::async, run_range, std::cref(params),
                                         begin, end, master_seed));
        }
        // Integer accumulators make the merge exact in any order.
        for (auto& f : futures) total.merge(f.get());
    }

    const auto horizon = static_cast<std::size_t>(params.horizon);
    EnsembleStats stats;
    stats.trials = trials;
    stats.cdf_by_round.resize(horizon + 1);
    stats.mean_gap_by_round.resize(horizon + 1);
    stats.mean_gap_active_by_round.resize(horizon + 1);
    stats.active_fraction_by_round.resize(horizon + 1);

    long long absorbed = 0;
    const auto n = static_cast<double>(trials);
    for (std::size_t r = 0; r <= horizon; ++r) {
        absorbed += total.success_by_round[r];
        const long long active = trials - absorbed;
        stats.cdf_by_round[r] = static_cast<double>(absorbed) / n;
        stats.mean_gap_by_round[r] = static_cast<double>(total.gap_sum[r]) / n;
        stats.mean_gap_active_by_round[r] =
            active > 0 ? static_cast<double>(total.gap_sum[r]) / static_cast<double>(active) : 0.0;
        stats.active_fraction_by_round[r] = static_cast<double>(active) / n;
    }
    stats.empirical_success_prob = stats.cdf_by_round.back();
    return stats;
}

FirstPassage first_passage_cdf(double q, int z, long horizon) {
    if (!valid_prob(q)) throw std::invalid_argument("q must be in [0, 1]");
    if (z < 0) throw std::invalid_argument("z must be nonnegative");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");

    FirstPassage out;
    out.cdf.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
    out.reachable = horizon >= z;
    if (z == 0) {
        std::fill(out.cdf.begin(), out.cdf.end(), 1.0);
        return out;
    }

    // Deficits above `width` cannot influence absorption within the horizon
    // by more than ~Phi_bar(8) of mass; dropping them keeps the sweep
    // O(horizon * sqrt(horizon)) without visible error.
    const long width =
        z + 8 * static_cast<long>(std::ceil(std::sqrt(static_cast<double>(horizon)))) + 8;
    const double p_up = 1.0 - q;

    std::vector<double> cur(static_cast<std::size_t>(width) + 2, 0.0);
    std::vector<double> next(cur.size(), 0.0);
    cur[static_cast<std::size_t>(z)] = 1.0;

    double absorbed = 0.0;
    for (long t = 1; t <= horizon; ++t) {
        const long lo = std::max<long>(1, z - t);
        const long hi = std::min<long>(width, z + t);
        std::fill(next.begin() + lo, next.begin() + hi + 1, 0.0);
        absorbed += q * cur[1];
        for (long d = lo; d <= hi; ++d) {
            next[static_cast<std::size_t>(d)] =
                q * cur[static_cast<std::size_t>(d) + 1] +
                (d >= 2 ? p_up * cur[static_cast<std::size_t>(d) - 1] : 0.0);
        }
        out.cdf[static_cast<std::size_t>(t)] = absorbed;
        std::swap(cur, next);
    }
    return out;
}

OracleResult markov_catch_up_oracle(double q, int z, long horizon) {
    if (z < 1) throw std::invalid_argument("z must be positive");
    FirstPassage fp = first_passage_cdf(q, z, horizon);
    if (!fp.reachable) return {0.0, false};
    return {fp.cdf.back(), true};
}

} // namespace powrace::race
