#include "matchflow/matchers.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace matchflow {

namespace {

class Recorder {
public:
    explicit Recorder(const ArrivalStream& stream) {
        validate(stream);
        occupied_.assign(stream.params.n_bins(), false);
        result_.assignment.assign(stream.params.n_balls(), std::nullopt);
        result_.trajectory.reserve(stream.params.n_balls() + 1);
        result_.trajectory.push_back(0);
    }

    bool occupied(BinId bin) const { return occupied_[bin]; }

    void match(BallId ball, BinId bin) {
        occupied_[bin] = true;
        result_.assignment[ball] = bin;
        ++result_.matched_count;
    }

    void end_arrival() { result_.trajectory.push_back(result_.matched_count); }

    MatchResult& result() { return result_; }

private:
    std::vector<bool> occupied_;
    MatchResult result_;
};

}  // namespace

std::string_view to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::oblivious: return "oblivious";
        case Algorithm::greedy: return "greedy";
        case Algorithm::ranking: return "ranking";
        case Algorithm::weighted: return "weighted";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view id) {
    for (Algorithm algo :
         {Algorithm::oblivious, Algorithm::greedy, Algorithm::ranking, Algorithm::weighted}) {
        if (id == to_string(algo)) {
            return algo;
        }
    }
    throw std::invalid_argument("unknown algorithm '" + std::string(id) +
                                "'; valid ids are oblivious, greedy, ranking, weighted");
}

MatchResult run_oblivious(const ArrivalStream& stream, Rng& rng) {
    Recorder rec(stream);
    rec.result().selections.assign(stream.params.n_balls(), std::nullopt);
    for (const NeighborSet& arrival : stream.arrivals) {
        if (!arrival.bins.empty()) {
            const BinId pick = arrival.bins[rng.uniform_index(arrival.bins.size())];
            rec.result().selections[arrival.ball_id] = pick;
            if (!rec.occupied(pick)) {
                rec.match(arrival.ball_id, pick);
            }
        }
        rec.end_arrival();
    }
    return std::move(rec.result());
}

MatchResult run_greedy(const ArrivalStream& stream, Rng& rng) {
    Recorder rec(stream);
    std::vector<BinId> free_bins;
    for (const NeighborSet& arrival : stream.arrivals) {
        free_bins.clear();
        for (BinId bin : arrival.bins) {
            if (!rec.occupied(bin)) {
                free_bins.push_back(bin);
            }
        }
        if (!free_bins.empty()) {
            rec.match(arrival.ball_id, free_bins[rng.uniform_index(free_bins.size())]);
        }
        rec.end_arrival();
    }
    return std::move(rec.result());
}

MatchResult run_ranking(const ArrivalStream& stream, std::span<const BinId> order) {
    const std::size_t n_bins = stream.params.n_bins();
    if (order.size() != n_bins) {
        throw std::invalid_argument("run_ranking: order has " + std::to_string(order.size()) +
                                    " entries, expected " + std::to_string(n_bins));
    }
    constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> position(n_bins, kUnset);
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (order[k] >= n_bins || position[order[k]] != kUnset) {
            throw std::invalid_argument("run_ranking: order is not a permutation of the bins");
        }
        position[order[k]] = k;
    }

    Recorder rec(stream);
    for (const NeighborSet& arrival : stream.arrivals) {
        std::optional<BinId> best;
        for (BinId bin : arrival.bins) {
            if (!rec.occupied(bin) && (!best || position[bin] < position[*best])) {
                best = bin;
            }
        }
        if (best) {
            rec.match(arrival.ball_id, *best);
        }
        rec.end_arrival();
    }
    return std::move(rec.result());
}

RankedMatchResult run_vertex_weighted(const ArrivalStream& stream, std::span<const Rank> ranks,
                                      std::size_t num_ranks, Rng& rng) {
    if (num_ranks == 0) {
        throw std::invalid_argument("run_vertex_weighted: num_ranks must be positive");
    }
    if (ranks.size() != stream.params.n_bins()) {
        throw std::invalid_argument("run_vertex_weighted: need one rank per bin");
    }
    for (Rank r : ranks) {
        if (r < 1 || r > num_ranks) {
            throw std::invalid_argument("run_vertex_weighted: rank " + std::to_string(r) +
                                        " outside 1.." + std::to_string(num_ranks));
        }
    }

    Recorder rec(stream);
    std::vector<std::size_t> per_rank(num_ranks, 0);
    std::vector<BinId> best_bins;
    for (const NeighborSet& arrival : stream.arrivals) {
        best_bins.clear();
        Rank best_rank = 0;
        for (BinId bin : arrival.bins) {
            if (rec.occupied(bin)) {
                continue;
            }
            if (best_bins.empty() || ranks[bin] < best_rank) {
                best_bins.assign(1, bin);
                best_rank = ranks[bin];
            } else if (ranks[bin] == best_rank) {
                best_bins.push_back(bin);
            }
        }
        if (!best_bins.empty()) {
            const BinId pick = best_bins.size() == 1
                                   ? best_bins.front()
                                   : best_bins[rng.uniform_index(best_bins.size())];
            rec.match(arrival.ball_id, pick);
            ++per_rank[best_rank - 1];
        }
        rec.end_arrival();
    }
    return RankedMatchResult{std::move(rec.result()), std::move(per_rank)};
}

RankedMatchResult run_vertex_weighted(const ArrivalStream& stream, const RankProfile& profile,
                                      Rng& rng) {
    if (profile.n_bins() != stream.params.n_bins()) {
        throw std::invalid_argument("run_vertex_weighted: rank profile covers " +
                                    std::to_string(profile.n_bins()) + " bins, stream has " +
                                    std::to_string(stream.params.n_bins()));
    }
    const std::vector<Rank> ranks = profile.bin_ranks();
    return run_vertex_weighted(stream, ranks, profile.num_ranks(), rng);
}

std::vector<BinId> random_bin_order(std::size_t n_bins, Rng& rng) {
    std::vector<BinId> order(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) {
        order[i] = static_cast<BinId>(i);
    }
    for (std::size_t i = n_bins; i > 1; --i) {
        std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }
    return order;
}

}  // namespace matchflow
