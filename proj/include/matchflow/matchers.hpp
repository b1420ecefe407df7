#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "matchflow/graph.hpp"
#include "matchflow/random.hpp"
#include "matchflow/rank_profile.hpp"

namespace matchflow {

enum class Algorithm { oblivious, greedy, ranking, weighted };

std::string_view to_string(Algorithm algo);

/// Parses "oblivious", "greedy", "ranking" or "weighted". Throws
/// std::invalid_argument naming the valid ids otherwise.
Algorithm parse_algorithm(std::string_view id);

/// Outcome of one online run.
///
/// trajectory[t] is the number of occupied bins immediately before ball t
/// arrives (0-based), and trajectory[n_balls] is the final count, so
/// trajectory.front() == 0 and trajectory.back() == matched_count.
struct MatchResult {
    std::vector<std::optional<BinId>> assignment;
    std::size_t matched_count = 0;
    std::vector<std::size_t> trajectory;
    /// OBLIVIOUS only: the bin each non-isolated ball tried, whether or not
    /// the attempt succeeded. Empty for the other algorithms.
    std::vector<std::optional<BinId>> selections;
};

struct RankedMatchResult {
    MatchResult base;
    /// per_rank_matched[r-1] counts matched bins of rank r.
    std::vector<std::size_t> per_rank_matched;
};

/// Each non-isolated ball picks one uniform neighbor without looking at
/// occupancy, and is matched only if that bin is free.
MatchResult run_oblivious(const ArrivalStream& stream, Rng& rng);

/// Each ball is matched to a uniformly random unoccupied neighbor, if any.
MatchResult run_greedy(const ArrivalStream& stream, Rng& rng);

/// `order` lists every bin exactly once, highest priority first. Each ball
/// takes its unoccupied neighbor that appears earliest in `order`.
/// Throws std::invalid_argument if `order` is not a permutation of the bins.
MatchResult run_ranking(const ArrivalStream& stream, std::span<const BinId> order);

/// Each ball takes an unoccupied neighbor of minimum rank; ties among equal
/// ranks are broken uniformly at random. `ranks` has one entry in
/// [1, num_ranks] per bin.
RankedMatchResult run_vertex_weighted(const ArrivalStream& stream, std::span<const Rank> ranks,
                                      std::size_t num_ranks, Rng& rng);

RankedMatchResult run_vertex_weighted(const ArrivalStream& stream, const RankProfile& profile,
                                      Rng& rng);

/// Uniform random bin order (Fisher-Yates) for RANKING.
std::vector<BinId> random_bin_order(std::size_t n_bins, Rng& rng);

}  // namespace matchflow
