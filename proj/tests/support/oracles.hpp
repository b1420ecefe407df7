#pragma once

// Independent reference computations used only by the tests. None of these
// share code paths with the library routines they check.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "matchflow/graph.hpp"
#include "matchflow/matchers.hpp"

namespace matchflow::testing {

// High-precision values (40-digit mpmath evaluation of the closed forms).
namespace frozen {
inline constexpr double kObliviousC1 = 0.46853639461338433;
inline constexpr double kObliviousC2 = 0.57880725217646466;
inline constexpr double kObliviousC5 = 0.62963343701399712;
inline constexpr double kGreedyC05 = 0.33640686849762755;
inline constexpr double kGreedyC1 = 0.51011987435525002;
inline constexpr double kGreedyC2 = 0.68845936980016805;
inline constexpr double kGreedyCe = 0.75734797756104033;
inline constexpr double kGreedyC5 = 0.86204549614180807;
inline constexpr double kOmegaConstant = 0.56714329040978387;  // x e^x = 1
inline constexpr double kBoundC1 = 0.54406190732359581;
inline constexpr double kBoundC2 = 0.78392642695423608;
inline constexpr double kBoundC001 = 0.0099013128534580051;
inline constexpr double kRatioGreedyC1 = 0.93761365662353232;
inline constexpr double kRatioGreedyCstar = 0.83708752003085698;
inline constexpr double kRatioObliviousC1 = 0.86118213443439884;
inline constexpr double kWeightedRank1 = 0.39545977288404366;  // c=2, g=(.5,.5), tau=1
inline constexpr double kWeightedRank2 = 0.29299959691612439;
inline constexpr double kGammaLowerC5 = 0.0412292327205392;
inline constexpr double kGammaUpperC5 = 4.7980456546076961;
inline constexpr double kGammaLowerCstar = 0.31057162073296631;
}  // namespace frozen

/// Exhaustive maximum matching: try every bin (or nothing) for each ball.
inline std::size_t brute_force_max_matching(const BipartiteInstance& inst) {
    const std::size_t balls = inst.adjacency.size();
    std::vector<bool> used(inst.params.n_bins(), false);
    std::size_t best = 0;
    auto go = [&](auto&& self, std::size_t t, std::size_t size) -> void {
        if (size + (balls - t) <= best) return;
        if (t == balls) {
            best = std::max(best, size);
            return;
        }
        for (BinId b : inst.adjacency[t].bins) {
            if (!used[b]) {
                used[b] = true;
                self(self, t + 1, size + 1);
                used[b] = false;
            }
        }
        self(self, t + 1, size);
    };
    go(go, 0, 0);
    return best;
}

/// Exact size law computed arrival by arrival: each ball's neighbor set is
/// drawn fresh (2^n subsets) given the current occupancy, instead of
/// enumerating whole graphs first.
inline std::vector<long double> arrival_first_distribution(std::size_t n, double p,
                                                           Algorithm algo) {
    const long double pe = p;
    const long double qe = 1.0L - pe;
    const std::uint32_t all = (1u << n) - 1;
    std::vector<long double> subset_prob(all + 1);
    for (std::uint32_t s = 0; s <= all; ++s) {
        const int k = std::popcount(s);
        subset_prob[s] = std::pow(pe, k) * std::pow(qe, static_cast<int>(n) - k);
    }
    std::vector<long double> law(n + 1, 0.0L);

    // Random-choice algorithms.
    auto step = [&](auto&& self, std::size_t t, std::uint32_t occ, std::size_t matched,
                    long double w) -> void {
        if (t == n) {
            law[matched] += w;
            return;
        }
        for (std::uint32_t nb = 0; nb <= all; ++nb) {
            const long double wn = w * subset_prob[nb];
            if (wn == 0.0L) continue;
            if (algo == Algorithm::greedy) {
                const std::uint32_t free_bins = nb & ~occ;
                if (!free_bins) {
                    self(self, t + 1, occ, matched, wn);
                    continue;
                }
                const int k = std::popcount(free_bins);
                for (std::uint32_t b = 0; b < n; ++b) {
                    if (free_bins >> b & 1u) self(self, t + 1, occ | (1u << b), matched + 1, wn / k);
                }
            } else {
                if (!nb) {
                    self(self, t + 1, occ, matched, wn);
                    continue;
                }
                const int k = std::popcount(nb);
                for (std::uint32_t b = 0; b < n; ++b) {
                    if (!(nb >> b & 1u)) continue;
                    if (occ >> b & 1u) {
                        self(self, t + 1, occ, matched, wn / k);
                    } else {
                        self(self, t + 1, occ | (1u << b), matched + 1, wn / k);
                    }
                }
            }
        }
    };

    if (algo != Algorithm::ranking) {
        step(step, 0, 0, 0, 1.0L);
        return law;
    }

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    long double perms = 0;
    std::vector<std::vector<std::uint32_t>> orders;
    do {
        orders.push_back(order);
        perms += 1;
    } while (std::next_permutation(order.begin(), order.end()));
    for (const auto& ord : orders) {
        auto rank_step = [&](auto&& self, std::size_t t, std::uint32_t occ, std::size_t matched,
                             long double w) -> void {
            if (t == n) {
                law[matched] += w;
                return;
            }
            for (std::uint32_t nb = 0; nb <= all; ++nb) {
                const long double wn = w * subset_prob[nb];
                if (wn == 0.0L) continue;
                bool placed = false;
                for (std::uint32_t b : ord) {
                    if ((nb >> b & 1u) && !(occ >> b & 1u)) {
                        self(self, t + 1, occ | (1u << b), matched + 1, wn);
                        placed = true;
                        break;
                    }
                }
                if (!placed) self(self, t + 1, occ, matched, wn);
            }
        };
        rank_step(rank_step, 0, 0, 0, 1.0L / perms);
    }
    return law;
}

inline double binomial_pmf(std::size_t n, double p, std::size_t k) {
    const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    return std::exp(log_choose + k * std::log(p) + (n - k) * std::log1p(-p));
}

/// Smallest root of x = c exp(-c e^{-x}) by a fine scan from 0 and bisection.
inline double gamma_by_scan(double c) {
    auto h = [c](double x) { return x - c * std::exp(-c * std::exp(-x)); };
    double lo = 0.0;
    const double step = 1e-4;
    while (h(lo + step) < 0.0) lo += step;
    double hi = lo + step;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Tiny deterministic instance generator for property tests.
inline BipartiteInstance random_small_instance(Rng& rng, std::size_t max_n) {
    const std::size_t n_bins = 1 + rng.uniform_index(max_n);
    const std::size_t n_balls = 1 + rng.uniform_index(max_n);
    const double p = 0.05 + 0.9 * rng.uniform01();
    return sample_instance(GraphParams::with_probability(n_bins, n_balls, p), rng);
}

}  // namespace matchflow::testing
