#include "matchflow/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace matchflow {

namespace {

void check_sizes(std::size_t n_bins, std::size_t n_balls) {
    if (n_bins < 1 || n_balls < 1) {
        throw std::invalid_argument("GraphParams: n_bins and n_balls must be at least 1");
    }
    if (n_bins > UINT32_MAX || n_balls > UINT32_MAX) {
        throw std::invalid_argument("GraphParams: sizes must fit in 32 bits");
    }
}

void check_probability(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("GraphParams: p must lie in (0, 1), got " + std::to_string(p));
    }
}

void validate_rows(const GraphParams& params, const std::vector<NeighborSet>& rows) {
    if (rows.size() != params.n_balls()) {
        throw std::invalid_argument("row count " + std::to_string(rows.size()) +
                                    " does not match n_balls " +
                                    std::to_string(params.n_balls()));
    }
    for (std::size_t t = 0; t < rows.size(); ++t) {
        const NeighborSet& row = rows[t];
        if (row.ball_id != t) {
            throw std::invalid_argument("arrival " + std::to_string(t) + " carries ball_id " +
                                        std::to_string(row.ball_id));
        }
        for (std::size_t k = 0; k < row.bins.size(); ++k) {
            if (row.bins[k] >= params.n_bins()) {
                throw std::invalid_argument("ball " + std::to_string(t) +
                                            " has out-of-range bin " +
                                            std::to_string(row.bins[k]));
            }
            if (k > 0 && row.bins[k - 1] >= row.bins[k]) {
                throw std::invalid_argument("ball " + std::to_string(t) +
                                            " neighbor list is not strictly increasing");
            }
        }
    }
}

}  // namespace

GraphParams GraphParams::with_probability(std::size_t n_bins, std::size_t n_balls, double p) {
    check_sizes(n_bins, n_balls);
    check_probability(p);
    return GraphParams(n_bins, n_balls, p, std::nullopt);
}

GraphParams GraphParams::with_mean_degree(std::size_t n_bins, std::size_t n_balls, double c) {
    check_sizes(n_bins, n_balls);
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("GraphParams: c must be positive");
    }
    const double p = c / static_cast<double>(n_bins);
    check_probability(p);
    return GraphParams(n_bins, n_balls, p, c);
}

double GraphParams::mean_degree() const {
    return c_ ? *c_ : p_ * static_cast<double>(n_bins_);
}

NeighborSet make_neighbor_set(BallId ball, std::vector<BinId> bins, std::size_t n_bins) {
    std::sort(bins.begin(), bins.end());
    if (std::adjacent_find(bins.begin(), bins.end()) != bins.end()) {
        throw std::invalid_argument("neighbor set has duplicate bins");
    }
    if (!bins.empty() && bins.back() >= n_bins) {
        throw std::invalid_argument("neighbor set has a bin index >= n_bins");
    }
    return NeighborSet{ball, std::move(bins)};
}

std::size_t BipartiteInstance::edge_count() const {
    std::size_t total = 0;
    for (const auto& row : adjacency) {
        total += row.bins.size();
    }
    return total;
}

void validate(const ArrivalStream& stream) { validate_rows(stream.params, stream.arrivals); }

void validate(const BipartiteInstance& instance) {
    validate_rows(instance.params, instance.adjacency);
}

NeighborSet sample_arrival(const GraphParams& params, BallId ball, Rng& rng) {
    const std::size_t n = params.n_bins();
    const double p = params.p();
    NeighborSet row{ball, {}};

    if (p <= kSparseThreshold) {
        const double log1m_p = std::log1p(-p);
        std::size_t next = 0;
        for (;;) {
            next += rng.geometric_skip(log1m_p, n - next);
            if (next >= n) {
                break;
            }
            row.bins.push_back(static_cast<BinId>(next));
            ++next;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.uniform01() < p) {
                row.bins.push_back(static_cast<BinId>(i));
            }
        }
    }
    return row;
}

BipartiteInstance sample_instance(const GraphParams& params, Rng& rng) {
    BipartiteInstance instance{params, {}};
    instance.adjacency.reserve(params.n_balls());
    for (std::size_t t = 0; t < params.n_balls(); ++t) {
        instance.adjacency.push_back(sample_arrival(params, static_cast<BallId>(t), rng));
    }
    return instance;
}

BipartiteInstance sample_instance(const GraphParams& params, RngSeed seed) {
    Rng rng(seed);
    return sample_instance(params, rng);
}

ArrivalStream to_stream(const BipartiteInstance& instance) {
    return ArrivalStream{instance.params, instance.adjacency};
}

BipartiteInstance to_instance(const ArrivalStream& stream) {
    return BipartiteInstance{stream.params, stream.arrivals};
}

}  // namespace matchflow
