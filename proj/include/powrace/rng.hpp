#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace powrace {

/// Default master seed for reproducible runs (documented in the CLI help).
inline constexpr std::uint64_t kDefaultSeed = 0x5EEDB10CULL;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based substream derivation: stream `index` under `master_seed` is
/// reproducible in isolation, independent of how many sibling streams exist.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(splitmix64(master_seed) + index);
}

/// Deterministic random stream with a fully specified draw sequence
/// (mt19937_64 plus explicit conversions), so results are reproducible
/// across platforms and safe to use from one thread per stream.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static RandomStream substream(std::uint64_t master_seed, std::uint64_t index) {
        return RandomStream(splitmix64(master_seed) + index);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Rayleigh amplitude of scale sigma via inverse CDF.
    double rayleigh(double sigma) {
        return sigma * std::sqrt(-2.0 * std::log1p(-uniform()));
    }

private:
    std::mt19937_64 engine_;
};

} // namespace powrace
