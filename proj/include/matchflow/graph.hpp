#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "matchflow/random.hpp"

namespace matchflow {

using BinId = std::uint32_t;
using BallId = std::uint32_t;

/// Shape and edge probability of a G(n_bins, n_balls, p) instance.
///
/// Constructed only through the named factories, which reject p outside the
/// open interval (0, 1). When built from a mean degree c, p is stored as
/// exactly c / n_bins.
class GraphParams {
public:
    static GraphParams with_probability(std::size_t n_bins, std::size_t n_balls, double p);
    static GraphParams with_mean_degree(std::size_t n_bins, std::size_t n_balls, double c);

    /// Balanced n x n shorthands.
    static GraphParams balanced_p(std::size_t n, double p) { return with_probability(n, n, p); }
    static GraphParams balanced_c(std::size_t n, double c) { return with_mean_degree(n, n, c); }

    std::size_t n_bins() const { return n_bins_; }
    std::size_t n_balls() const { return n_balls_; }
    double p() const { return p_; }
    std::optional<double> c() const { return c_; }

    /// c when it was given, otherwise p * n_bins.
    double mean_degree() const;

    friend bool operator==(const GraphParams&, const GraphParams&) = default;

private:
    GraphParams(std::size_t n_bins, std::size_t n_balls, double p, std::optional<double> c)
        : n_bins_(n_bins), n_balls_(n_balls), p_(p), c_(c) {}

    std::size_t n_bins_;
    std::size_t n_balls_;
    double p_;
    std::optional<double> c_;
};

/// Bins adjacent to one ball, strictly increasing.
struct NeighborSet {
    BallId ball_id = 0;
    std::vector<BinId> bins;

    friend bool operator==(const NeighborSet&, const NeighborSet&) = default;
};

/// Builds a NeighborSet from bins in any order. Throws std::invalid_argument
/// on duplicates or indices >= n_bins.
NeighborSet make_neighbor_set(BallId ball, std::vector<BinId> bins, std::size_t n_bins);

/// Online view: arrivals in order, arrival t carries ball_id t.
struct ArrivalStream {
    GraphParams params;
    std::vector<NeighborSet> arrivals;

    friend bool operator==(const ArrivalStream&, const ArrivalStream&) = default;
};

/// Offline view of the same graph.
struct BipartiteInstance {
    GraphParams params;
    std::vector<NeighborSet> adjacency;

    std::size_t edge_count() const;

    friend bool operator==(const BipartiteInstance&, const BipartiteInstance&) = default;
};

/// Throws std::invalid_argument if any structural invariant is broken.
void validate(const ArrivalStream& stream);
void validate(const BipartiteInstance& instance);

/// Draws one ball's neighbor set. Each bin is included independently with
/// probability p. Uses geometric skips for p <= kSparseThreshold.
NeighborSet sample_arrival(const GraphParams& params, BallId ball, Rng& rng);

inline constexpr double kSparseThreshold = 0.01;

/// Draws every ball's row from a fresh substream keyed by `seed`.
BipartiteInstance sample_instance(const GraphParams& params, RngSeed seed);

/// Same as above, continuing an existing generator.
BipartiteInstance sample_instance(const GraphParams& params, Rng& rng);

ArrivalStream to_stream(const BipartiteInstance& instance);
BipartiteInstance to_instance(const ArrivalStream& stream);

}  // namespace matchflow
