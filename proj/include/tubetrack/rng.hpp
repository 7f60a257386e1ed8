#pragma once

#include <cmath>
#include <cstdint>

namespace tubetrack {

/// splitmix64 step; the basis for all seeding and counter-based streams.
/// Keeping the generator in-repo makes outputs reproducible across platforms
/// and standard library versions.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Stateless hash of (seed, counter) into a well-mixed 64-bit value.
inline std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t s = seed ^ (0xA0761D6478BD642Full + counter * 0xE7037ED1A0B428DBull);
    return splitmix64(s);
}

/// Small deterministic PRNG wrapping splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // burn one step so seed 0 and seed-from-hash behave alike
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in [0, n) without modulo bias (rejection on the tail).
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    /// Uniform double in [0, 1).
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Standard normal via Box-Muller (one value per call, second discarded).
    double normal() {
        double u1 = next_double();
        const double u2 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

private:
    static constexpr double kPi = 3.14159265358979323846;
    std::uint64_t state_;
};

}  // namespace tubetrack
