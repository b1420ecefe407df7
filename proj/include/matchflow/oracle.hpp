#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "matchflow/graph.hpp"
#include "matchflow/matchers.hpp"

namespace matchflow {

/// Maximum-cardinality matching with a witness and a minimum vertex cover
/// of the same size.
struct MaxMatching {
    std::size_t size = 0;
    std::vector<std::optional<BinId>> ball_to_bin;
    std::vector<BallId> cover_balls;
    std::vector<BinId> cover_bins;
};

/// Hopcroft-Karp. The cover comes from the alternating-path reachability set
/// left by the final phase.
MaxMatching maximum_matching(const BipartiteInstance& instance);

inline std::size_t max_matching(const BipartiteInstance& instance) {
    return maximum_matching(instance).size;
}

/// Exact law of the matching size. probabilities[k] = P(size == k).
struct SizeDistribution {
    std::vector<long double> probabilities;

    long double total() const;
    long double mean() const;
};

/// Largest componentwise |a - b|; a missing entry counts as zero.
long double max_gap(const SizeDistribution& a, const SizeDistribution& b);

inline constexpr std::size_t kMaxEnumerationSize = 4;

/// Exact distribution of the online matching size on G(n, n, p) over the joint
/// randomness of the graph and the algorithm. Enumerates all 2^(n*n) graphs;
/// GREEDY averages over its choices by recursive expectation, RANKING over all
/// n! bin orders, OBLIVIOUS over each ball's uniform selection.
///
/// Throws std::invalid_argument for n outside [1, 4], p outside [0, 1], or
/// Algorithm::weighted.
SizeDistribution exact_online_distribution(std::size_t n, double p, Algorithm algo);

struct RatioSample {
    double ratio = 1.0;
    std::size_t matched = 0;
    std::size_t maximum = 0;
    /// Set when the instance has no edges at all (maximum == 0); the ratio is
    /// then reported as 1.
    bool degenerate = false;
};

/// matched_count / max(1, mu*). Throws std::invalid_argument if `result`
/// was not produced on an instance of this shape.
RatioSample empirical_ratio(const BipartiteInstance& instance, const MatchResult& result);

}  // namespace matchflow
