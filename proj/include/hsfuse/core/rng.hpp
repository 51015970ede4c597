#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hsfuse {

// Counter-based pseudo-random numbers. Every draw is a pure function of
// (seed, stream, counter), so results are independent of evaluation order and
// identical across platforms — std::<distribution>s are not guaranteed to be.

namespace rngdetail {

inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace rngdetail

/// One u64 from the (seed, stream, counter) triple.
inline uint64_t rng_u64(uint64_t seed, uint64_t stream, uint64_t counter) {
    uint64_t h = rngdetail::mix64(seed ^ 0x6a09e667f3bcc909ull);
    h = rngdetail::mix64(h ^ stream);
    return rngdetail::mix64(h ^ counter);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double rng_unit(uint64_t seed, uint64_t stream, uint64_t counter) {
    return static_cast<double>(rng_u64(seed, stream, counter) >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on two counter draws (2*counter, 2*counter+1).
inline double rng_normal(uint64_t seed, uint64_t stream, uint64_t counter) {
    double u1 = rng_unit(seed, stream, 2 * counter);
    double u2 = rng_unit(seed, stream, 2 * counter + 1);
    double r = std::sqrt(-2.0 * std::log1p(-u1)); // log(1-u1); u1<1 so finite
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

/// Sequential convenience wrapper around the counter scheme for code that
/// naturally draws in a fixed order (bootstrap sampling, shuffles).
class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

    uint64_t next_u64() { return rng_u64(seed_, stream_, counter_++); }

    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n) via 128-bit multiply (no modulo bias worth
    /// caring about at these ranges, and fully deterministic).
    uint64_t next_index(uint64_t n) {
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    double next_normal() {
        double u1 = next_unit();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    uint64_t seed_;
    uint64_t stream_;
    uint64_t counter_ = 0;
};

} // namespace hsfuse
