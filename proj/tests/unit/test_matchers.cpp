#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "matchflow/matchers.hpp"
#include "matchflow/oracle.hpp"
#include "support/oracles.hpp"

using namespace matchflow;

namespace {

ArrivalStream stream_of(std::size_t n_bins, std::vector<std::vector<BinId>> rows) {
    ArrivalStream stream{GraphParams::with_probability(n_bins, rows.size(), 0.5), {}};
    for (std::size_t t = 0; t < rows.size(); ++t) {
        stream.arrivals.push_back(make_neighbor_set(static_cast<BallId>(t), rows[t], n_bins));
    }
    return stream;
}

bool has_edge(const NeighborSet& row, BinId bin) {
    return std::binary_search(row.bins.begin(), row.bins.end(), bin);
}

void check_valid(const ArrivalStream& stream, const MatchResult& result) {
    REQUIRE(result.assignment.size() == stream.arrivals.size());
    REQUIRE(result.trajectory.size() == stream.arrivals.size() + 1);
    CHECK(result.trajectory.front() == 0);
    CHECK(result.trajectory.back() == result.matched_count);
    std::set<BinId> used;
    std::size_t matched = 0;
    for (std::size_t t = 0; t < stream.arrivals.size(); ++t) {
        const auto& bin = result.assignment[t];
        const std::size_t step = result.trajectory[t + 1] - result.trajectory[t];
        REQUIRE(result.trajectory[t + 1] >= result.trajectory[t]);
        REQUIRE(step == (bin ? 1u : 0u));
        if (bin) {
            REQUIRE(has_edge(stream.arrivals[t], *bin));
            REQUIRE(used.insert(*bin).second);
            ++matched;
        }
    }
    CHECK(matched == result.matched_count);
}

/// A dropped ball must have found every neighbor already taken.
void check_maximal(const ArrivalStream& stream, const MatchResult& result) {
    std::vector<bool> occupied(stream.params.n_bins(), false);
    for (std::size_t t = 0; t < stream.arrivals.size(); ++t) {
        if (result.assignment[t]) {
            occupied[*result.assignment[t]] = true;
            continue;
        }
        for (BinId b : stream.arrivals[t].bins) REQUIRE(occupied[b]);
    }
}

std::vector<double> empirical_law(std::size_t n, double p, std::size_t runs, std::uint64_t seed,
                                  const std::function<std::size_t(const ArrivalStream&, Rng&)>& algo) {
    std::vector<double> law(n + 1, 0.0);
    Rng rng({seed, 0});
    const auto params = GraphParams::balanced_p(n, p);
    for (std::size_t i = 0; i < runs; ++i) {
        const ArrivalStream stream = to_stream(sample_instance(params, rng));
        law[algo(stream, rng)] += 1.0;
    }
    for (double& x : law) x /= static_cast<double>(runs);
    return law;
}

void check_law_close(const std::vector<double>& empirical, const SizeDistribution& exact,
                     std::size_t runs) {
    REQUIRE(empirical.size() == exact.probabilities.size());
    for (std::size_t k = 0; k < empirical.size(); ++k) {
        const double pk = static_cast<double>(exact.probabilities[k]);
        const double se = std::sqrt(std::max(pk * (1 - pk), 1e-12) / runs);
        CAPTURE(k);
        CHECK(std::fabs(empirical[k] - pk) < 5 * se + 1e-12);
    }
}

}  // namespace

TEST_SUITE("matchers") {
    TEST_CASE("algorithm ids round-trip and unknown ids list the valid ones") {
        for (Algorithm a : {Algorithm::oblivious, Algorithm::greedy, Algorithm::ranking,
                            Algorithm::weighted}) {
            CHECK(parse_algorithm(to_string(a)) == a);
        }
        try {
            parse_algorithm("bogus");
            FAIL("expected invalid_argument");
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            CHECK(msg.find("greedy") != std::string::npos);
            CHECK(msg.find("oblivious") != std::string::npos);
        }
    }

    TEST_CASE("all-empty stream matches nothing") {
        const auto stream = stream_of(3, {{}, {}, {}});
        Rng rng({1, 0});
        CHECK(run_oblivious(stream, rng).matched_count == 0);
        CHECK(run_greedy(stream, rng).matched_count == 0);
        const std::vector<BinId> order{0, 1, 2};
        CHECK(run_ranking(stream, order).matched_count == 0);
        const auto weighted = run_vertex_weighted(stream, RankProfile::from_counts({1, 2}), rng);
        CHECK(weighted.base.matched_count == 0);
        CHECK(weighted.per_rank_matched == std::vector<std::size_t>{0, 0});
    }

    TEST_CASE("single ball with a single neighbor is matched by every algorithm") {
        const auto stream = stream_of(1, {{0}});
        Rng rng({2, 0});
        CHECK(run_oblivious(stream, rng).matched_count == 1);
        CHECK(run_greedy(stream, rng).matched_count == 1);
        const std::vector<BinId> order{0};
        CHECK(run_ranking(stream, order).matched_count == 1);
        CHECK(run_vertex_weighted(stream, RankProfile::from_counts({1}), rng).base.matched_count == 1);
    }

    TEST_CASE("greedy on a complete stream matches every ball") {
        const std::size_t n = 6;
        std::vector<BinId> all(n);
        std::iota(all.begin(), all.end(), 0u);
        const auto stream = stream_of(n, std::vector<std::vector<BinId>>(n, all));
        for (std::uint64_t s = 0; s < 20; ++s) {
            Rng rng({s, 0});
            CHECK(run_greedy(stream, rng).matched_count == n);
        }
    }

    TEST_CASE("greedy always takes the only unoccupied neighbor") {
        // Ball 0 is forced onto bin 1, so ball 1 has one free neighbor left.
        const auto stream = stream_of(3, {{1}, {0, 1}});
        for (std::uint64_t s = 0; s < 50; ++s) {
            Rng rng({s, 0});
            const auto result = run_greedy(stream, rng);
            CHECK(result.assignment[1] == std::optional<BinId>(0));
        }
    }

    TEST_CASE("ranking follows the supplied priority order") {
        const auto two = stream_of(2, {{0, 1}});
        const std::vector<BinId> bin1_first{1, 0};
        CHECK(run_ranking(two, bin1_first).assignment[0] == std::optional<BinId>(1));

        const auto three = stream_of(3, {{2, 0, 1}});
        const std::vector<BinId> identity{0, 1, 2};
        CHECK(run_ranking(three, identity).assignment[0] == std::optional<BinId>(0));
    }

    TEST_CASE("ranking rejects orders that are not permutations") {
        const auto stream = stream_of(3, {{0}});
        const std::vector<BinId> short_order{0, 1};
        const std::vector<BinId> repeated{0, 1, 1};
        const std::vector<BinId> out_of_range{0, 1, 3};
        CHECK_THROWS_AS(run_ranking(stream, short_order), std::invalid_argument);
        CHECK_THROWS_AS(run_ranking(stream, repeated), std::invalid_argument);
        CHECK_THROWS_AS(run_ranking(stream, out_of_range), std::invalid_argument);
    }

    TEST_CASE("vertex-weighted prefers the lower rank") {
        // Bin 0 has rank 2 and bin 1 rank 1.
        const auto stream = stream_of(2, {{0, 1}});
        const std::vector<Rank> ranks{2, 1};
        Rng rng({3, 0});
        const auto result = run_vertex_weighted(stream, ranks, 2, rng);
        CHECK(result.base.assignment[0] == std::optional<BinId>(1));
        CHECK(result.per_rank_matched == std::vector<std::size_t>{1, 0});
    }

    TEST_CASE("vertex-weighted input validation") {
        const auto stream = stream_of(2, {{0, 1}});
        Rng rng({4, 0});
        const std::vector<Rank> zero_rank{0, 1};
        const std::vector<Rank> too_high{1, 3};
        const std::vector<Rank> wrong_size{1};
        CHECK_THROWS_AS(run_vertex_weighted(stream, zero_rank, 2, rng), std::invalid_argument);
        CHECK_THROWS_AS(run_vertex_weighted(stream, too_high, 2, rng), std::invalid_argument);
        CHECK_THROWS_AS(run_vertex_weighted(stream, wrong_size, 2, rng), std::invalid_argument);
        CHECK_THROWS_AS(run_vertex_weighted(stream, RankProfile::from_counts({1, 2}), rng),
                        std::invalid_argument);
    }

    TEST_CASE("random_bin_order is a permutation") {
        Rng rng({5, 0});
        for (std::size_t n : {1u, 2u, 17u, 1000u}) {
            auto order = random_bin_order(n, rng);
            std::sort(order.begin(), order.end());
            for (std::size_t i = 0; i < n; ++i) REQUIRE(order[i] == i);
        }
    }

    TEST_CASE("property: validity, trajectory and maximality on random instances") {
        Rng gen({2718, 0});
        for (int i = 0; i < 500; ++i) {
            const auto inst = testing::random_small_instance(gen, 15);
            const auto stream = to_stream(inst);
            const std::size_t n_bins = inst.params.n_bins();

            const auto oblivious = run_oblivious(stream, gen);
            check_valid(stream, oblivious);
            REQUIRE(oblivious.selections.size() == stream.arrivals.size());
            std::vector<bool> occupied(n_bins, false);
            for (std::size_t t = 0; t < stream.arrivals.size(); ++t) {
                const auto& sel = oblivious.selections[t];
                REQUIRE(sel.has_value() == !stream.arrivals[t].bins.empty());
                if (!sel) continue;
                REQUIRE(has_edge(stream.arrivals[t], *sel));
                if (oblivious.assignment[t]) {
                    REQUIRE(*oblivious.assignment[t] == *sel);
                    occupied[*sel] = true;
                } else {
                    REQUIRE(occupied[*sel]);
                }
            }

            const auto greedy = run_greedy(stream, gen);
            check_valid(stream, greedy);
            check_maximal(stream, greedy);

            const auto order = random_bin_order(n_bins, gen);
            const auto ranking = run_ranking(stream, order);
            check_valid(stream, ranking);
            check_maximal(stream, ranking);

            const std::size_t m = 1 + gen.uniform_index(std::min<std::size_t>(n_bins, 4));
            std::vector<double> g(m);
            for (double& x : g) x = 0.1 + gen.uniform01();
            const auto profile = RankProfile::from_proportions(g, n_bins);
            const auto weighted = run_vertex_weighted(stream, profile, gen);
            check_valid(stream, weighted.base);
            check_maximal(stream, weighted.base);
            REQUIRE(weighted.per_rank_matched.size() == profile.num_ranks());
            CHECK(std::accumulate(weighted.per_rank_matched.begin(),
                                  weighted.per_rank_matched.end(), std::size_t{0}) ==
                  weighted.base.matched_count);
            const auto ranks = profile.bin_ranks();
            std::vector<std::size_t> tally(m, 0);
            for (std::size_t t = 0; t < stream.arrivals.size(); ++t) {
                const auto& bin = weighted.base.assignment[t];
                if (!bin) continue;
                ++tally[ranks[*bin] - 1];
                // No strictly better-ranked neighbor was free at this arrival.
                for (BinId b : stream.arrivals[t].bins) {
                    if (ranks[b] >= ranks[*bin]) continue;
                    bool taken_before = false;
                    for (std::size_t s = 0; s < t; ++s) {
                        taken_before |= weighted.base.assignment[s] == std::optional<BinId>(b);
                    }
                    REQUIRE(taken_before);
                }
            }
            CHECK(tally == weighted.per_rank_matched);
            for (std::size_t r = 0; r < m; ++r) {
                CHECK(weighted.per_rank_matched[r] <= profile.counts()[r]);
            }
        }
    }

    TEST_CASE("property: greedy is a half-approximation of the brute-force maximum") {
        Rng gen({1414, 0});
        for (int i = 0; i < 500; ++i) {
            const auto inst = testing::random_small_instance(gen, 8);
            const auto stream = to_stream(inst);
            const std::size_t best = testing::brute_force_max_matching(inst);
            const std::size_t half = (best + 1) / 2;
            CHECK(run_greedy(stream, gen).matched_count >= half);
            const auto order = random_bin_order(inst.params.n_bins(), gen);
            CHECK(run_ranking(stream, order).matched_count >= half);
            CHECK(run_greedy(stream, gen).matched_count <= best);
            CHECK(run_oblivious(stream, gen).matched_count <= best);
        }
    }

    TEST_CASE("simulated greedy and one-rank weighted follow the exact greedy law") {
        const std::size_t n = 4;
        const double p = 0.5;
        const std::size_t runs = 200000;
        const auto exact = testing::arrival_first_distribution(n, p, Algorithm::greedy);
        const SizeDistribution exact_law{exact};

        const auto greedy = empirical_law(n, p, runs, 60, [](const ArrivalStream& s, Rng& r) {
            return run_greedy(s, r).matched_count;
        });
        check_law_close(greedy, exact_law, runs);

        const auto one_rank = RankProfile::from_counts({n});
        const auto weighted =
            empirical_law(n, p, runs, 61, [&](const ArrivalStream& s, Rng& r) {
                return run_vertex_weighted(s, one_rank, r).base.matched_count;
            });
        check_law_close(weighted, exact_law, runs);
    }

    TEST_CASE("simulated oblivious follows its exact law") {
        const std::size_t n = 3;
        const double p = 0.6;
        const std::size_t runs = 200000;
        const SizeDistribution exact{testing::arrival_first_distribution(n, p, Algorithm::oblivious)};
        const auto law = empirical_law(n, p, runs, 62, [](const ArrivalStream& s, Rng& r) {
            return run_oblivious(s, r).matched_count;
        });
        check_law_close(law, exact, runs);
    }

    TEST_CASE("mean fractions at n = 1e5 sit near the limiting formulas") {
        const std::size_t n = 100000;
        const auto params = GraphParams::balanced_c(n, 1.0);
        double oblivious = 0;
        double greedy = 0;
        for (std::uint64_t k = 0; k < 10; ++k) {
            Rng rng({500, k});
            const auto stream = to_stream(sample_instance(params, rng));
            oblivious += static_cast<double>(run_oblivious(stream, rng).matched_count) / n;
            greedy += static_cast<double>(run_greedy(stream, rng).matched_count) / n;
        }
        CHECK(std::fabs(oblivious / 10 - testing::frozen::kObliviousC1) < 0.005);
        CHECK(std::fabs(greedy / 10 - testing::frozen::kGreedyC1) < 0.005);
    }

    TEST_CASE("matchers reject malformed streams") {
        auto stream = stream_of(2, {{0}, {1}});
        stream.arrivals[1].ball_id = 0;
        Rng rng({6, 0});
        CHECK_THROWS_AS(run_greedy(stream, rng), std::invalid_argument);
        CHECK_THROWS_AS(run_oblivious(stream, rng), std::invalid_argument);
    }
}
