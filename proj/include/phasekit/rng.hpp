#pragma once

#include <cmath>
#include <cstdint>

namespace phasekit {

// Counter-based randomness: every draw is a pure function of (seed, counter),
// so parallel or out-of-order generation reproduces the same stream and two
// runs with the same seed are bit-identical on any platform.  The standard
// library distributions are not pinned across implementations, hence the
// hand-rolled mixer (SplitMix64) and Box-Muller below.
struct CounterRng {
    std::uint64_t seed = 0;

    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    // Uniform in [0, 1), 53-bit mantissa.
    double uniform(std::uint64_t counter) const {
        const std::uint64_t z = mix(mix(seed) ^ mix(counter));
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes counters 2c and 2c+1.
    double normal(std::uint64_t counter) const {
        const double u1 = uniform(2 * counter);
        const double u2 = uniform(2 * counter + 1);
        const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        return r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }
};

} // namespace phasekit
