#include "powrace/channel.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace powrace::channel {
namespace {

/// (1 - p)^n, accurate for p anywhere in [0, 1].
double pow_one_minus(double p, double n) {
    return std::exp(n * std::log1p(-p));
}

/// 1 - (1 - p)^n, accurate when the result is tiny.
double one_minus_pow_one_minus(double p, double n) {
    return -std::expm1(n * std::log1p(-p));
}

/// E[f(gamma)] for instantaneous SNR gamma ~ Exponential(mean gamma_bar),
/// by midpoint evaluation over equiprobable quantile strata. Deterministic;
/// resolves the narrow low-SNR transition region even at large gamma_bar.
template <typename F>
double fading_average(double gamma_bar, long strata, F f) {
    double sum = 0.0;
    for (long i = 0; i < strata; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(strata);
        const double gamma = -gamma_bar * std::log1p(-u);
        sum += f(gamma);
    }
    return sum / static_cast<double>(strata);
}

constexpr long kAverageStrata = 1L << 21;

/// Fading-averaged BER by numeric averaging of instantaneous_ber. This is a
/// separate route from average_ber's closed form; the fast-fading simulator
/// draws per-attempt outcomes from it.
double numeric_average_ber(double gamma_bar) {
    static std::mutex mutex;
    static std::map<double, double> cache;
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(gamma_bar);
        if (it != cache.end()) return it->second;
    }
    const double value =
        fading_average(gamma_bar, kAverageStrata, [](double g) { return instantaneous_ber(g); });
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(gamma_bar, value);
    return value;
}

/// Probability that a single transmission attempt fails under the given
/// fading model (packet of L bits).
double attempt_failure_prob(const LinkParams& link) {
    const double L = static_cast<double>(link.bits_per_packet);
    if (link.fading == FadingModel::kFastPerBit) {
        return one_minus_pow_one_minus(average_ber(link), L);
    }
    // One fade held across the packet: average the conditional failure
    // probability over the fade distribution.
    return fading_average(link.mean_bit_snr(), kAverageStrata, [L](double g) {
        return one_minus_pow_one_minus(instantaneous_ber(g), L);
    });
}

} // namespace

double LinkParams::sinr_linear() const {
    return std::pow(10.0, sinr_db / 10.0);
}

double LinkParams::mean_bit_snr() const {
    return 2.0 * rayleigh_scale * rayleigh_scale * sinr_linear();
}

void LinkParams::validate() const {
    if (std::isnan(sinr_db)) throw std::invalid_argument("sinr_db must be a number");
    if (!(rayleigh_scale > 0.0) || !std::isfinite(rayleigh_scale)) {
        throw std::invalid_argument("rayleigh_scale must be positive");
    }
    if (bits_per_packet < 1) throw std::invalid_argument("bits_per_packet must be >= 1");
    if (packets_per_block < 1) throw std::invalid_argument("packets_per_block must be >= 1");
    if (max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
}

double instantaneous_ber(double snr_linear) {
    if (!(snr_linear >= 0.0)) throw std::invalid_argument("invalid snr");
    // Gray-coded QPSK per-bit error: Phi_bar(sqrt(2 snr)) = erfc(sqrt(snr)) / 2.
    return 0.5 * std::erfc(std::sqrt(snr_linear));
}

double average_ber(const LinkParams& link) {
    link.validate();
    const double gbar = link.mean_bit_snr();
    return 0.5 * (1.0 - std::sqrt(gbar / (1.0 + gbar)));
}

LinkReliability block_delivery_prob(const LinkParams& link) {
    link.validate();
    LinkReliability out;
    out.avg_ber = average_ber(link);

    const double pf = attempt_failure_prob(link);
    out.packet_success = 1.0 - pf;

    // Packet lost only if all max_attempts attempts fail.
    const double pf_all = std::exp(static_cast<double>(link.max_attempts) * std::log(pf));
    out.packet_delivery = 1.0 - pf_all;

    // All packets_per_block packets must get through.
    out.block_delivery = pow_one_minus(pf_all, static_cast<double>(link.packets_per_block));
    return out;
}

DeliveryOutcome simulate_block_delivery(const LinkParams& link, RandomStream& rng) {
    link.validate();
    const double L = static_cast<double>(link.bits_per_packet);
    const bool fast = link.fading == FadingModel::kFastPerBit;
    const double fast_attempt_success =
        fast ? pow_one_minus(numeric_average_ber(link.mean_bit_snr()), L) : 0.0;

    DeliveryOutcome out;
    for (long packet = 0; packet < link.packets_per_block; ++packet) {
        bool delivered = false;
        for (int attempt = 0; attempt < link.max_attempts; ++attempt) {
            ++out.attempts_used;
            double p_success;
            if (fast) {
                p_success = fast_attempt_success;
            } else {
                const double h = rng.rayleigh(link.rayleigh_scale);
                const double ber = instantaneous_ber(h * h * link.sinr_linear());
                p_success = pow_one_minus(ber, L);
            }
            if (rng.bernoulli(p_success)) {
                delivered = true;
                break;
            }
        }
        if (!delivered) {
            out.delivered = false; // remaining packets are not sent
            return out;
        }
    }
    out.delivered = true;
    return out;
}

} // namespace powrace::channel
