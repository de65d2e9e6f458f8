#pragma once

#include <cstdint>
#include <random>

namespace qrdv {

// Seeded random stream. Wraps mt19937_64 with hand-rolled draw helpers so
// that outputs are identical across standard libraries and platforms
// (uniform_int_distribution and friends are implementation-defined).
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform integer in [0, bound), bound >= 1. Rejection sampling keeps it
    // exactly uniform.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % bound;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 gen_;
};

// splitmix64 step; used to mix (seed, stream id) into substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent substream: one base seed fans out to per-channel, per-user and
// per-engine streams that never share state.
inline RngStream derive_stream(std::uint64_t base_seed, std::uint64_t stream_id) {
    return RngStream(splitmix64(splitmix64(base_seed) ^ splitmix64(stream_id)));
}

}  // namespace qrdv
