#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "powrace/rng.hpp"

namespace powrace::race {

struct RaceParams {
    double q_w = 0.4;    // attacker mines the next block first
    double q_c = 1.0;    // honest broadcast succeeds in a round
    int z = 6;           // attacker's initial block deficit
    long horizon = 1000; // cap on effective rounds per trial

    /// Success is reaching deficit 0 (tie with the honest tip). Set to
    /// require deficit -1 (a strictly longer chain) instead; the closed
    /// forms below always model the tie rule.
    bool strict_lead = false;

    void validate() const;
};

enum class RoundOutcome {
    kAttackerWin,        // probability q_w
    kHonestWinDelivered, // probability (1 - q_w) * q_c
    kHonestWinLost,      // probability (1 - q_w) * (1 - q_c); block orphaned
};

struct TrialResult {
    bool success = false;
    std::optional<long> success_round; // effective-round index
    /// Deficit after each effective round (+-1 steps); stops at the first
    /// success or at the horizon.
    std::vector<int> gap_trajectory;
    long raw_rounds = 0;      // all rounds, including orphaned honest wins
    long orphaned_blocks = 0; // honest wins whose broadcast failed
};

struct EnsembleStats {
    long trials = 0;
    double empirical_success_prob = 0.0;
    /// Index r: fraction of trials that succeeded within r effective rounds.
    std::vector<double> cdf_by_round;
    /// Index r: mean deficit after r effective rounds (index 0 = initial z);
    /// trials already absorbed contribute 0.
    std::vector<double> mean_gap_by_round;
    /// Mean deficit over trials still racing at round r (0 when none are).
    std::vector<double> mean_gap_active_by_round;
    std::vector<double> active_fraction_by_round;
};

/// q: probability the attacker wins an effective round,
/// q_w / (q_w + (1 - q_w) q_c). Throws "degenerate race" when no effective
/// round can occur.
double effective_round_prob(double q_w, double q_c);

/// Q = q_w / ((1 - q_w) q_c) = q / (1 - q); +infinity when q_w = 1 or q_c = 0.
double advantage_ratio(double q_w, double q_c);

/// P(z) = 1 when Q >= 1, else Q^z; P(0) = 1.
double catch_up_probability(double q_w, double q_c, int z);

/// Smallest q_w with catch_up_probability(q_w, q_c, z) >= target_prob:
///   Q* = target_prob^(1/z),  q_w* = Q* q_c / (1 + Q* q_c).
/// target_prob = 1 gives the guaranteed-success bound q_c / (1 + q_c).
double min_attacker_power(double q_c, int z, double target_prob);

/// Cooperative attackers pool their mining power; the race depends only on
/// the summed share.
double aggregate_shares(std::span<const double> shares);

RoundOutcome sample_round(const RaceParams& params, RandomStream& rng);

TrialResult run_trial(const RaceParams& params, RandomStream& rng);

/// `trials` independent trials on substreams derived from (master_seed,
/// trial index), aggregated with integer accumulators so the result is
/// identical no matter how trials are scheduled. threads = 0 picks the
/// hardware count.
EnsembleStats run_ensemble(const RaceParams& params, long trials,
                           std::uint64_t master_seed, int threads = 0);

struct FirstPassage {
    /// Index t: probability of absorption at deficit 0 within t steps.
    std::vector<double> cdf;
    bool reachable = true; // false when horizon < z
};

/// Exact first-passage distribution of the +-1 walk with down-step
/// probability q, by dynamic programming over (round, deficit).
FirstPassage first_passage_cdf(double q, int z, long horizon);

struct OracleResult {
    double probability = 0.0;
    bool reachable = true;
};

/// Independent validation oracle: absorption probability within `horizon`
/// steps; converges to min(1, (q/(1-q))^z) as the horizon grows.
OracleResult markov_catch_up_oracle(double q, int z, long horizon);

} // namespace powrace::race
