#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "matchflow/oracle.hpp"
#include "support/oracles.hpp"

using namespace matchflow;

namespace {

BipartiteInstance instance_of(std::size_t n_bins, std::vector<std::vector<BinId>> rows) {
    BipartiteInstance inst{GraphParams::with_probability(n_bins, rows.size(), 0.5), {}};
    for (std::size_t t = 0; t < rows.size(); ++t) {
        inst.adjacency.push_back(make_neighbor_set(static_cast<BallId>(t), rows[t], n_bins));
    }
    return inst;
}

void check_certificate(const BipartiteInstance& inst, const MaxMatching& mm) {
    REQUIRE(mm.ball_to_bin.size() == inst.adjacency.size());
    std::set<BinId> used;
    std::size_t size = 0;
    for (std::size_t t = 0; t < inst.adjacency.size(); ++t) {
        if (!mm.ball_to_bin[t]) continue;
        const auto& bins = inst.adjacency[t].bins;
        REQUIRE(std::binary_search(bins.begin(), bins.end(), *mm.ball_to_bin[t]));
        REQUIRE(used.insert(*mm.ball_to_bin[t]).second);
        ++size;
    }
    CHECK(size == mm.size);
    // A vertex cover of the same size proves optimality.
    CHECK(mm.cover_balls.size() + mm.cover_bins.size() == mm.size);
    const std::set<BallId> cb(mm.cover_balls.begin(), mm.cover_balls.end());
    const std::set<BinId> cj(mm.cover_bins.begin(), mm.cover_bins.end());
    for (const auto& row : inst.adjacency) {
        for (BinId b : row.bins) REQUIRE((cb.count(row.ball_id) || cj.count(b)));
    }
}

}  // namespace

TEST_SUITE("offline-oracle") {
    TEST_CASE("edgeless and complete instances") {
        CHECK(max_matching(instance_of(4, {{}, {}, {}, {}})) == 0);
        const std::vector<BinId> all{0, 1, 2, 3};
        const auto complete = instance_of(4, {all, all, all, all});
        CHECK(max_matching(complete) == 4);
        check_certificate(complete, maximum_matching(complete));
    }

    TEST_CASE("augmenting paths are found where greedy choices would block") {
        // Ball 0 could take bin 0, but then ball 1 needs it; the maximum is 3.
        const auto inst = instance_of(3, {{0, 1}, {0}, {1, 2}});
        const auto mm = maximum_matching(inst);
        CHECK(mm.size == 3);
        check_certificate(inst, mm);
    }

    TEST_CASE("unbalanced sides") {
        const auto more_balls = instance_of(2, {{0, 1}, {0}, {1}, {0, 1}});
        CHECK(max_matching(more_balls) == 2);
        check_certificate(more_balls, maximum_matching(more_balls));
        const auto more_bins = instance_of(6, {{5}, {0, 5}});
        CHECK(max_matching(more_bins) == 2);
    }

    TEST_CASE("property: Hopcroft-Karp equals brute force on random small instances") {
        Rng gen({404, 0});
        for (int i = 0; i < 100; ++i) {
            const std::size_t n = 1 + gen.uniform_index(4);
            const auto inst = sample_instance(GraphParams::balanced_p(n, 0.1 + 0.8 * gen.uniform01()), gen);
            const auto mm = maximum_matching(inst);
            REQUIRE(mm.size == testing::brute_force_max_matching(inst));
            check_certificate(inst, mm);
        }
        for (int i = 0; i < 300; ++i) {
            const auto inst = testing::random_small_instance(gen, 9);
            const auto mm = maximum_matching(inst);
            REQUIRE(mm.size == testing::brute_force_max_matching(inst));
            check_certificate(inst, mm);
        }
    }

    TEST_CASE("property: cover certificate on larger sparse graphs") {
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto inst = sample_instance(GraphParams::balanced_c(2000, 1.0 + s), RngSeed{s, 9});
            check_certificate(inst, maximum_matching(inst));
        }
    }

    TEST_CASE("property: maximum dominates every online result") {
        Rng gen({405, 0});
        for (int i = 0; i < 50; ++i) {
            const auto inst = sample_instance(GraphParams::balanced_c(300, 0.5 + 5 * gen.uniform01()), gen);
            const auto stream = to_stream(inst);
            const std::size_t best = max_matching(inst);
            CHECK(run_greedy(stream, gen).matched_count <= best);
            CHECK(run_oblivious(stream, gen).matched_count <= best);
            const auto order = random_bin_order(300, gen);
            CHECK(run_ranking(stream, order).matched_count <= best);
        }
    }

    TEST_CASE("mean mu*/n at n = 1e4, c = 1 does not exceed the asymptotic bound") {
        double total = 0;
        for (std::uint64_t k = 0; k < 20; ++k) {
            total += static_cast<double>(max_matching(
                sample_instance(GraphParams::balanced_c(10000, 1.0), RngSeed{606, k}))) / 10000;
        }
        CHECK(total / 20 <= 0.5441 + 0.01);
    }

    TEST_CASE("n = 1 law is a single Bernoulli edge for every algorithm") {
        for (double q : {0.0, 0.25, 0.7, 1.0}) {
            for (Algorithm a : {Algorithm::oblivious, Algorithm::greedy, Algorithm::ranking}) {
                const auto law = exact_online_distribution(1, q, a);
                REQUIRE(law.probabilities.size() == 2);
                CHECK(std::fabs(static_cast<double>(law.probabilities[1]) - q) < 1e-15);
                CHECK(std::fabs(static_cast<double>(law.probabilities[0]) - (1 - q)) < 1e-15);
            }
        }
    }

    TEST_CASE("n = 2, p = 1 greedy matches both balls surely") {
        const auto law = exact_online_distribution(2, 1.0, Algorithm::greedy);
        CHECK(law.probabilities[2] == 1.0L);
        CHECK(law.probabilities[0] == 0.0L);
        CHECK(law.probabilities[1] == 0.0L);
    }

    TEST_CASE("n = 2, p = 1 oblivious collides half the time") {
        const auto law = exact_online_distribution(2, 1.0, Algorithm::oblivious);
        CHECK(std::fabs(static_cast<double>(law.probabilities[1]) - 0.5) < 1e-15);
        CHECK(std::fabs(static_cast<double>(law.probabilities[2]) - 0.5) < 1e-15);
    }

    TEST_CASE("graph-first enumeration agrees with the arrival-first recursion") {
        for (std::size_t n = 1; n <= 4; ++n) {
            for (double p : {0.3, 0.5, 0.9}) {
                if (n == 4 && p != 0.5) continue;
                for (Algorithm a : {Algorithm::oblivious, Algorithm::greedy, Algorithm::ranking}) {
                    CAPTURE(n);
                    CAPTURE(p);
                    CAPTURE(to_string(a));
                    const auto lib = exact_online_distribution(n, p, a);
                    const SizeDistribution ref{testing::arrival_first_distribution(n, p, a)};
                    CHECK(std::fabs(static_cast<double>(lib.total() - 1.0L)) < 1e-12);
                    CHECK(static_cast<double>(max_gap(lib, ref)) < 1e-12);
                }
            }
        }
    }

    TEST_CASE("n = 3, p = 0.5 greedy and ranking laws coincide") {
        const auto g = exact_online_distribution(3, 0.5, Algorithm::greedy);
        const auto r = exact_online_distribution(3, 0.5, Algorithm::ranking);
        CHECK(static_cast<double>(max_gap(g, r)) < 1e-12);
        // Oblivious is strictly worse in expectation.
        const auto o = exact_online_distribution(3, 0.5, Algorithm::oblivious);
        CHECK(o.mean() < g.mean());
    }

    TEST_CASE("exact_online_distribution rejects bad arguments") {
        CHECK_THROWS_AS(exact_online_distribution(0, 0.5, Algorithm::greedy), std::invalid_argument);
        CHECK_THROWS_AS(exact_online_distribution(5, 0.5, Algorithm::greedy), std::invalid_argument);
        CHECK_THROWS_AS(exact_online_distribution(2, -0.1, Algorithm::greedy), std::invalid_argument);
        CHECK_THROWS_AS(exact_online_distribution(2, 1.5, Algorithm::greedy), std::invalid_argument);
        CHECK_THROWS_AS(exact_online_distribution(2, 0.5, Algorithm::weighted), std::invalid_argument);
    }

    TEST_CASE("max_gap pads the shorter law with zeros") {
        const SizeDistribution a{{0.5L, 0.5L}};
        const SizeDistribution b{{0.5L, 0.25L, 0.25L}};
        CHECK(max_gap(a, b) == 0.25L);
        CHECK(b.mean() == 0.75L);
    }

    TEST_CASE("empirical_ratio") {
        const auto edgeless = instance_of(3, {{}, {}, {}});
        Rng rng({7, 0});
        const auto none = run_greedy(to_stream(edgeless), rng);
        const auto degenerate = empirical_ratio(edgeless, none);
        CHECK(degenerate.degenerate);
        CHECK(degenerate.ratio == 1.0);

        // Balls 0 and 1 grab bins 0 and 1, stranding balls 2 and 3; the maximum is 4.
        const auto inst = instance_of(4, {{0, 2}, {1, 3}, {0}, {1}});
        MatchResult two;
        two.assignment = {0u, 1u, std::nullopt, std::nullopt};
        two.matched_count = 2;
        two.trajectory = {0, 1, 2, 2, 2};
        const auto half = empirical_ratio(inst, two);
        CHECK(half.maximum == 4);
        CHECK(half.matched == 2);
        CHECK(half.ratio == 0.5);
        CHECK_FALSE(half.degenerate);

        MatchResult wrong_shape = two;
        wrong_shape.assignment.push_back(std::nullopt);
        wrong_shape.trajectory.push_back(2);
        CHECK_THROWS_AS(empirical_ratio(inst, wrong_shape), std::invalid_argument);
    }
}
