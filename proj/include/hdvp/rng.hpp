#pragma once

#include <cstdint>

namespace hdvp {

/// SplitMix64 generator (Steele, Lea, Flood 2014). Chosen over the <random>
/// engines because its output stream and the bounded-draw helpers below are
/// fully specified here, so seeded runs reproduce bit-identically on any
/// platform; std::uniform_int_distribution makes no such guarantee.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound). Rejection-free multiply-shift would bias
    /// for huge bounds; rejection sampling keeps it exact for any bound >= 1.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound; // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

/// Stateless mix of a base seed and a stream index; used to derive
/// independent per-trial generators so trials can run in any order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL + stream * 0xd1342543de82ef95ULL));
    return g.next_u64();
}

} // namespace hdvp
