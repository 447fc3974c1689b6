#pragma once

#include <cstdint>
#include <random>

namespace lachesis {

/// Deterministic random source. std::mt19937_64 has a standardized output
/// sequence, but the standard distributions do not, so all mappings from
/// raw 64-bit draws to ranges live here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection sampling keeps the mapping exactly uniform.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool chance(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

/// Splits one master seed into independent per-concern seeds (stakes, city
/// assignment, jitter, ...) so consuming one stream never shifts another.
inline std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t tag) {
    // splitmix64 finalizer over seed ^ tagged offset
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace lachesis
