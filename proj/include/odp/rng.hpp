#pragma once

// Reproducible random streams.
//
// Every stream is a std::mt19937_64 (algorithm fixed by the C++ standard) whose
// seed is derived from (base seed, replication, stream id) with the SplitMix64
// finalizer. Uniform variates are built from the top 53 bits of each draw, and
// every other variate is obtained by inversion, so a given seed produces the
// same numbers on any conforming toolchain.

#include <cmath>
#include <cstdint>
#include <random>

namespace odp {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of stream `stream` inside replication `replication`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t replication,
                                    std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(splitmix64(base) ^ replication) ^ (stream + 0x632be59bd9b4e019ULL));
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
    RandomStream(std::uint64_t base, std::uint64_t replication, std::uint64_t stream)
        : engine_(derive_seed(base, replication, stream)) {}

    /// Uniform on (0, 1); never returns 0 or 1.
    double uniform() {
        for (;;) {
            const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    double normal() {
        // Box-Muller, one variate per call.
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace odp
