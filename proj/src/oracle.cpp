#include "matchflow/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace matchflow {

namespace {

constexpr std::uint32_t kNil = std::numeric_limits<std::uint32_t>::max();
constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();

class HopcroftKarp {
public:
    explicit HopcroftKarp(const BipartiteInstance& instance)
        : rows_(instance.adjacency),
          pair_ball_(instance.params.n_balls(), kNil),
          pair_bin_(instance.params.n_bins(), kNil),
          dist_(instance.params.n_balls(), kInf),
          next_edge_(instance.params.n_balls(), 0) {}

    std::size_t run() {
        std::size_t size = 0;
        while (layer()) {
            std::fill(next_edge_.begin(), next_edge_.end(), 0);
            for (std::uint32_t u = 0; u < pair_ball_.size(); ++u) {
                if (pair_ball_[u] == kNil && augment(u)) {
                    ++size;
                }
            }
        }
        return size;
    }

    MaxMatching result(std::size_t size) const {
        MaxMatching out;
        out.size = size;
        out.ball_to_bin.resize(pair_ball_.size());
        for (std::size_t u = 0; u < pair_ball_.size(); ++u) {
            if (pair_ball_[u] != kNil) {
                out.ball_to_bin[u] = pair_ball_[u];
            }
        }

        // Koenig: Z = vertices reachable from free balls by alternating paths.
        // Cover = (balls outside Z) + (bins inside Z).
        std::vector<bool> ball_seen(pair_ball_.size(), false);
        std::vector<bool> bin_seen(pair_bin_.size(), false);
        std::deque<std::uint32_t> queue;
        for (std::uint32_t u = 0; u < pair_ball_.size(); ++u) {
            if (pair_ball_[u] == kNil) {
                ball_seen[u] = true;
                queue.push_back(u);
            }
        }
        while (!queue.empty()) {
            const std::uint32_t u = queue.front();
            queue.pop_front();
            for (BinId v : rows_[u].bins) {
                if (bin_seen[v]) {
                    continue;
                }
                bin_seen[v] = true;
                const std::uint32_t w = pair_bin_[v];
                if (w != kNil && !ball_seen[w]) {
                    ball_seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        for (std::uint32_t u = 0; u < ball_seen.size(); ++u) {
            if (!ball_seen[u]) {
                out.cover_balls.push_back(u);
            }
        }
        for (std::uint32_t v = 0; v < bin_seen.size(); ++v) {
            if (bin_seen[v]) {
                out.cover_bins.push_back(v);
            }
        }
        return out;
    }

private:
    // BFS layering from the free balls. True if some free bin is reachable.
    bool layer() {
        std::deque<std::uint32_t> queue;
        for (std::uint32_t u = 0; u < pair_ball_.size(); ++u) {
            if (pair_ball_[u] == kNil) {
                dist_[u] = 0;
                queue.push_back(u);
            } else {
                dist_[u] = kInf;
            }
        }
        bool found = false;
        while (!queue.empty()) {
            const std::uint32_t u = queue.front();
            queue.pop_front();
            for (BinId v : rows_[u].bins) {
                const std::uint32_t w = pair_bin_[v];
                if (w == kNil) {
                    found = true;
                } else if (dist_[w] == kInf) {
                    dist_[w] = dist_[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        return found;
    }

    // Iterative layered DFS; augmenting paths can be long on sparse graphs.
    bool augment(std::uint32_t root) {
        stack_.assign(1, root);
        while (!stack_.empty()) {
            const std::uint32_t u = stack_.back();
            const auto& bins = rows_[u].bins;
            if (next_edge_[u] == bins.size()) {
                dist_[u] = kInf;
                stack_.pop_back();
                continue;
            }
            const BinId v = bins[next_edge_[u]++];
            const std::uint32_t w = pair_bin_[v];
            if (w == kNil) {
                std::uint32_t bin = v;
                for (std::size_t i = stack_.size(); i-- > 0;) {
                    const std::uint32_t ball = stack_[i];
                    const std::uint32_t previous = pair_ball_[ball];
                    pair_ball_[ball] = bin;
                    pair_bin_[bin] = ball;
                    bin = previous;
                }
                return true;
            }
            if (dist_[w] == dist_[u] + 1) {
                stack_.push_back(w);
            }
        }
        return false;
    }

    const std::vector<NeighborSet>& rows_;
    std::vector<std::uint32_t> pair_ball_;
    std::vector<std::uint32_t> pair_bin_;
    std::vector<std::uint32_t> dist_;
    std::vector<std::size_t> next_edge_;
    std::vector<std::uint32_t> stack_;
};

// Exact per-graph laws. Each graph is n bitmasks, one per ball.
using Rows = std::vector<std::uint32_t>;

void greedy_law(const Rows& rows, std::size_t t, std::uint32_t occupied, std::size_t matched,
                long double weight, std::vector<long double>& law) {
    if (t == rows.size()) {
        law[matched] += weight;
        return;
    }
    const std::uint32_t free_bins = rows[t] & ~occupied;
    if (free_bins == 0) {
        greedy_law(rows, t + 1, occupied, matched, weight, law);
        return;
    }
    const long double share = weight / std::popcount(free_bins);
    for (std::uint32_t rest = free_bins; rest != 0; rest &= rest - 1) {
        const std::uint32_t bit = rest & (~rest + 1);
        greedy_law(rows, t + 1, occupied | bit, matched + 1, share, law);
    }
}

void oblivious_law(const Rows& rows, std::size_t t, std::uint32_t occupied, std::size_t matched,
                   long double weight, std::vector<long double>& law) {
    if (t == rows.size()) {
        law[matched] += weight;
        return;
    }
    if (rows[t] == 0) {
        oblivious_law(rows, t + 1, occupied, matched, weight, law);
        return;
    }
    const long double share = weight / std::popcount(rows[t]);
    for (std::uint32_t rest = rows[t]; rest != 0; rest &= rest - 1) {
        const std::uint32_t bit = rest & (~rest + 1);
        if (occupied & bit) {
            oblivious_law(rows, t + 1, occupied, matched, share, law);
        } else {
            oblivious_law(rows, t + 1, occupied | bit, matched + 1, share, law);
        }
    }
}

void ranking_law(const Rows& rows, std::size_t n, long double weight,
                 std::vector<long double>& law) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::size_t permutations = 1;
    for (std::size_t k = 2; k <= n; ++k) {
        permutations *= k;
    }
    const long double share = weight / static_cast<long double>(permutations);
    do {
        std::uint32_t occupied = 0;
        std::size_t matched = 0;
        for (std::uint32_t row : rows) {
            for (std::uint32_t bin : order) {
                const std::uint32_t bit = 1u << bin;
                if ((row & bit) && !(occupied & bit)) {
                    occupied |= bit;
                    ++matched;
                    break;
                }
            }
        }
        law[matched] += share;
    } while (std::next_permutation(order.begin(), order.end()));
}

}  // namespace

MaxMatching maximum_matching(const BipartiteInstance& instance) {
    validate(instance);
    HopcroftKarp hk(instance);
    const std::size_t size = hk.run();
    return hk.result(size);
}

long double SizeDistribution::total() const {
    long double sum = 0.0L;
    for (long double x : probabilities) {
        sum += x;
    }
    return sum;
}

long double SizeDistribution::mean() const {
    long double sum = 0.0L;
    for (std::size_t k = 0; k < probabilities.size(); ++k) {
        sum += static_cast<long double>(k) * probabilities[k];
    }
    return sum;
}

long double max_gap(const SizeDistribution& a, const SizeDistribution& b) {
    const std::size_t len = std::max(a.probabilities.size(), b.probabilities.size());
    long double gap = 0.0L;
    for (std::size_t k = 0; k < len; ++k) {
        const long double x = k < a.probabilities.size() ? a.probabilities[k] : 0.0L;
        const long double y = k < b.probabilities.size() ? b.probabilities[k] : 0.0L;
        gap = std::max(gap, std::fabs(x - y));
    }
    return gap;
}

SizeDistribution exact_online_distribution(std::size_t n, double p, Algorithm algo) {
    if (n < 1 || n > kMaxEnumerationSize) {
        throw std::invalid_argument("exact_online_distribution: n must be in 1.." +
                                    std::to_string(kMaxEnumerationSize) + ", got " +
                                    std::to_string(n));
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("exact_online_distribution: p must lie in [0, 1]");
    }
    if (algo == Algorithm::weighted) {
        throw std::invalid_argument("exact_online_distribution: weighted is not enumerated");
    }

    const std::size_t cells = n * n;
    const std::uint32_t row_mask = (1u << n) - 1;
    const long double pe = p;
    const long double qe = 1.0L - pe;

    SizeDistribution dist;
    dist.probabilities.assign(n + 1, 0.0L);
    Rows rows(n);
    for (std::uint64_t graph = 0; graph < (std::uint64_t{1} << cells); ++graph) {
        const int edges = std::popcount(graph);
        const long double weight = std::pow(pe, edges) * std::pow(qe, static_cast<int>(cells) - edges);
        if (weight == 0.0L) {
            continue;
        }
        for (std::size_t ball = 0; ball < n; ++ball) {
            rows[ball] = static_cast<std::uint32_t>(graph >> (ball * n)) & row_mask;
        }
        switch (algo) {
            case Algorithm::greedy: greedy_law(rows, 0, 0, 0, weight, dist.probabilities); break;
            case Algorithm::oblivious:
                oblivious_law(rows, 0, 0, 0, weight, dist.probabilities);
                break;
            case Algorithm::ranking: ranking_law(rows, n, weight, dist.probabilities); break;
            case Algorithm::weighted: break;
        }
    }
    return dist;
}

RatioSample empirical_ratio(const BipartiteInstance& instance, const MatchResult& result) {
    if (result.assignment.size() != instance.params.n_balls() ||
        result.trajectory.size() != instance.params.n_balls() + 1) {
        throw std::invalid_argument("empirical_ratio: result does not match the instance shape");
    }
    RatioSample sample;
    sample.matched = result.matched_count;
    sample.maximum = max_matching(instance);
    if (sample.maximum == 0) {
        sample.degenerate = true;
        sample.ratio = 1.0;
    } else {
        sample.ratio = static_cast<double>(sample.matched) / static_cast<double>(sample.maximum);
    }
    return sample;
}

}  // namespace matchflow
