#include "matchflow/random.hpp"

#include <cmath>
#include <stdexcept>

namespace matchflow {

namespace {

std::mt19937_64 make_engine(RngSeed seed) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed.seed),
        static_cast<std::uint32_t>(seed.seed >> 32),
        static_cast<std::uint32_t>(seed.stream_id),
        static_cast<std::uint32_t>(seed.stream_id >> 32),
    };
    return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(RngSeed seed) : seed_(seed), engine_(make_engine(seed)) {}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_index(std::uint64_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("uniform_index: bound must be positive");
    }
    // Rejection on the low residue class keeps the draw exactly uniform.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t x = engine_();
        if (x >= threshold) {
            return x % bound;
        }
    }
}

std::uint64_t Rng::geometric_skip(double log1m_p, std::uint64_t cap) {
    // 1 - U lies in (0, 1], so the log is finite.
    const double u = 1.0 - uniform01();
    const double skip = std::floor(std::log(u) / log1m_p);
    if (!(skip < static_cast<double>(cap))) {
        return cap;
    }
    return static_cast<std::uint64_t>(skip);
}

}  // namespace matchflow
