#pragma once

#include <cstdint>

#include "powrace/rng.hpp"

namespace powrace::channel {

/// Granularity of the Rayleigh fade process.
///
/// kFastPerBit: every bit sees an independent fade, so a packet's success
/// probability is (1 - avg_ber)^L with avg_ber the fading-averaged BER.
/// This is the model behind the closed-form pipeline and the default
/// everywhere.
///
/// kBlockPerAttempt: one fade is drawn per packet transmission attempt and
/// held for the whole packet. Kept selectable because the fade coherence
/// time is a physical-layer assumption, not something the link abstraction
/// can decide.
enum class FadingModel {
    kFastPerBit,
    kBlockPerAttempt,
};

struct LinkParams {
    double sinr_db = 45.0;
    double rayleigh_scale = 0.5;
    long bits_per_packet = 8000;    // L
    long packets_per_block = 1000;  // K
    int max_attempts = 3;           // A, total transmission attempts per packet
    FadingModel fading = FadingModel::kFastPerBit;

    double sinr_linear() const;
    /// Mean per-bit SNR: E[h^2] * SINR = 2 sigma^2 * SINR.
    double mean_bit_snr() const;
    void validate() const; // throws std::invalid_argument naming the field
};

struct LinkReliability {
    double avg_ber = 0.0;         // fading-averaged bit error rate
    double packet_success = 0.0;  // single transmission attempt
    double packet_delivery = 0.0; // within max_attempts attempts
    double block_delivery = 0.0;  // q_c: all packets delivered
};

/// Per-realization QPSK bit error rate: the Gaussian upper-tail function at
/// sqrt(2 * snr). Monotone nonincreasing in snr. Throws on negative snr.
double instantaneous_ber(double snr_linear);

/// Rayleigh-averaged BER in closed form:
///   1/2 * (1 - sqrt(gbar / (1 + gbar))),  gbar = mean_bit_snr().
double average_ber(const LinkParams& link);

/// Full reliability pipeline under link.fading, ending in q_c.
LinkReliability block_delivery_prob(const LinkParams& link);

struct DeliveryOutcome {
    bool delivered = false;
    long attempts_used = 0;
};

/// Monte-Carlo transmission of one block: packets in order, up to
/// max_attempts tries each; the block fails as soon as a packet exhausts its
/// attempts. Per-attempt success is sampled under link.fading:
/// kBlockPerAttempt draws a fade per attempt and succeeds with
/// (1 - instantaneous_ber(h^2 * sinr))^L; kFastPerBit succeeds with the
/// per-attempt probability implied by a numerically fading-averaged BER
/// (computed by stratified averaging of instantaneous_ber, independent of
/// the closed form in average_ber).
DeliveryOutcome simulate_block_delivery(const LinkParams& link, RandomStream& rng);

} // namespace powrace::channel
