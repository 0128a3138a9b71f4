#pragma once

#include <cstdint>

namespace meanharm {

// SplitMix64 stream. Self-contained so that seeded runs are bitwise
// reproducible across platforms and standard-library versions; batch
// substreams are derived by mixing (seed, batch) so results do not
// depend on execution order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
        Rng r(seed);
        std::uint64_t s = r.next_u64();
        s ^= mix(a + 0x9e3779b97f4a7c15ULL);
        s ^= mix(b + 0x3c6ef372fe94f82aULL);
        return Rng(s);
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Uniform integer in [0, bound).
    std::uint64_t next_below(std::uint64_t bound) {
        // modulo bias is irrelevant at our bounds (tiny vs 2^64)
        return next_u64() % bound;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace meanharm
