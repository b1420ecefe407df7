#pragma once

#include <cstdint>
#include <random>

namespace matchflow {

/// Identifies one reproducible random substream: a base seed plus a
/// per-trial stream id.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Seeded generator with draws that are bit-identical across platforms.
///
/// The engine (mt19937_64) and the seed_seq expansion are fully specified by
/// the standard. The std distributions are not, so every draw used by the
/// simulator goes through the member functions below.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(RngSeed seed);

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }

    result_type operator()() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01();

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t uniform_index(std::uint64_t bound);

    /// Number of failures before the first success of a Bernoulli(p) sequence,
    /// capped at `cap`.
    std::uint64_t geometric_skip(double log1m_p, std::uint64_t cap);

    RngSeed seed() const { return seed_; }

private:
    RngSeed seed_;
    std::mt19937_64 engine_;
};

}  // namespace matchflow
