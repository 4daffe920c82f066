// rng.hpp
// Counter-based random number generation (philox4x32-10).
//
// Reproducibility contract: a generator is fully determined by a 64-bit seed
// (the key) and a 64-bit stream id (the high half of the 128-bit counter).
// Streams never overlap, so parallel consumers can each own a stream and the
// combined output is independent of scheduling. Path m of a simulation uses
// stream m; auxiliary draws (parameter generation, capital perturbation) use
// seeds derived from the master seed via split(), so they cannot collide
// with path streams.

#pragma once

#include <array>
#include <cstdint>

namespace statarb {

/// philox4x32 with 10 rounds (Salmon et al. 2011). Produces 128 bits per
/// block; blocks are indexed by a 128-bit counter = (block index, stream id).
class Philox {
public:
    Philox(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    /// One keyed block. Exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53 random bits.
    double next_double();

    /// Uniform double in (0, 1]; never exactly zero, safe under log().
    double next_open_double();

    /// Standard normal via Box-Muller (pairs are buffered).
    double next_gaussian();

    /// Uniform in [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_ = 0;
    std::uint64_t block_index_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffer_pos_ = 4;  // exhausted
    double gaussian_spare_ = 0.0;
    bool has_gaussian_spare_ = false;
};

/// Derives an unrelated 64-bit seed from (seed, purpose tag); splitmix64
/// finalizer. Used to give each consumer of randomness its own key space.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace statarb
