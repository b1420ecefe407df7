#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace matchflow {

using Rank = std::uint32_t;

/// Partition of the bins into rank classes 1..m (rank 1 is preferred).
/// proportions()[r-1] is exactly counts()[r-1] / n_bins().
class RankProfile {
public:
    static RankProfile from_counts(std::vector<std::size_t> counts);

    /// Rounds proportions g to integer counts summing to n by largest
    /// remainder; ties go to the lower rank. g must be nonnegative with a
    /// positive sum; it is normalised first.
    static RankProfile from_proportions(std::span<const double> g, std::size_t n);

    std::size_t num_ranks() const { return counts_.size(); }
    std::size_t n_bins() const { return n_bins_; }
    const std::vector<std::size_t>& counts() const { return counts_; }
    const std::vector<double>& proportions() const { return proportions_; }

    /// Rank of every bin, assigned in contiguous blocks: the first counts[0]
    /// bins get rank 1, and so on.
    std::vector<Rank> bin_ranks() const;

    friend bool operator==(const RankProfile&, const RankProfile&) = default;

private:
    explicit RankProfile(std::vector<std::size_t> counts);

    std::vector<std::size_t> counts_;
    std::vector<double> proportions_;
    std::size_t n_bins_ = 0;
};

}  // namespace matchflow
