#include "matchflow/rank_profile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace matchflow {

RankProfile::RankProfile(std::vector<std::size_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) {
        throw std::invalid_argument("RankProfile: need at least one rank class");
    }
    n_bins_ = std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
    if (n_bins_ == 0) {
        throw std::invalid_argument("RankProfile: total bin count must be positive");
    }
    proportions_.reserve(counts_.size());
    for (std::size_t count : counts_) {
        proportions_.push_back(static_cast<double>(count) / static_cast<double>(n_bins_));
    }
}

RankProfile RankProfile::from_counts(std::vector<std::size_t> counts) {
    return RankProfile(std::move(counts));
}

RankProfile RankProfile::from_proportions(std::span<const double> g, std::size_t n) {
    if (g.empty()) {
        throw std::invalid_argument("RankProfile: empty proportion list");
    }
    if (n == 0) {
        throw std::invalid_argument("RankProfile: n must be positive");
    }
    double total = 0.0;
    for (double x : g) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw std::invalid_argument("RankProfile: proportions must be finite and nonnegative");
        }
        total += x;
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("RankProfile: proportions must not all be zero");
    }

    std::vector<std::size_t> counts(g.size());
    std::vector<double> remainder(g.size());
    std::size_t assigned = 0;
    for (std::size_t r = 0; r < g.size(); ++r) {
        const double exact = g[r] / total * static_cast<double>(n);
        counts[r] = static_cast<std::size_t>(std::floor(exact));
        remainder[r] = exact - static_cast<double>(counts[r]);
        assigned += counts[r];
    }
    // Floating error can push the floor sum past n by one; trim from the back.
    for (std::size_t r = g.size(); assigned > n && r-- > 0;) {
        if (counts[r] > 0) {
            --counts[r];
            --assigned;
            remainder[r] += 1.0;
        }
    }

    std::vector<std::size_t> order(g.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < n; k = (k + 1) % order.size()) {
        ++counts[order[k]];
        ++assigned;
    }
    return RankProfile(std::move(counts));
}

std::vector<Rank> RankProfile::bin_ranks() const {
    std::vector<Rank> ranks;
    ranks.reserve(n_bins_);
    for (std::size_t r = 0; r < counts_.size(); ++r) {
        ranks.insert(ranks.end(), counts_[r], static_cast<Rank>(r + 1));
    }
    return ranks;
}

}  // namespace matchflow
