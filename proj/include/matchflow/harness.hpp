#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "matchflow/graph.hpp"
#include "matchflow/matchers.hpp"
#include "matchflow/oracle.hpp"
#include "matchflow/rank_profile.hpp"

namespace matchflow {

struct ExperimentConfig {
    Algorithm algo = Algorithm::greedy;
    std::size_t n = 0;
    /// Exactly one of c and p must be set.
    std::optional<double> c;
    std::optional<double> p;
    std::size_t trials = 1;
    /// Base seed. Trial k draws from the substream (seed, k).
    std::uint64_t seed = 0;
    /// Required for Algorithm::weighted; must cover n bins.
    std::optional<RankProfile> rank_profile;
    /// Compute mu* per instance and report the ratio of means.
    bool compute_max_matching = false;
    /// Worker count hint; 0 means hardware concurrency. Never affects results.
    std::size_t parallelism = 0;
};

/// Throws std::invalid_argument describing the first violated constraint.
void validate(const ExperimentConfig& config);

GraphParams graph_params(const ExperimentConfig& config);

struct TrialRecord {
    std::size_t trial = 0;
    RngSeed seed;
    std::size_t matched = 0;
    double fraction = 0.0;
    std::optional<std::size_t> max_matching;
    std::optional<double> ratio;
    std::vector<std::size_t> per_rank_matched;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<TrialRecord> per_trial;
    double mean_fraction = 0.0;
    /// Sample standard deviation over sqrt(trials); 0 for a single trial.
    double stderr_fraction = 0.0;
    double predicted_fraction = 0.0;
    double abs_error = 0.0;
    double mean_matched = 0.0;
    std::optional<double> mean_max_matching;
    /// mean(matched) / mean(mu*), when mu* was computed and is not all zero.
    std::optional<double> ratio_of_means;
    /// Weighted runs only: mean matched fraction (over n) per rank, and the
    /// closed-form prediction for each rank.
    std::vector<double> per_rank_means;
    std::vector<double> per_rank_predicted;
};

/// Limiting matched fraction for the configured algorithm and mean degree.
double predicted_fraction(const ExperimentConfig& config);

/// Runs config.trials independent trials, in parallel. The report depends
/// only on the config (never on parallelism or scheduling).
ExperimentReport run_experiment(const ExperimentConfig& config);

struct ConvergenceRow {
    std::size_t n = 0;
    std::size_t trials = 0;
    double mean_abs_error = 0.0;
    double max_abs_error = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

/// One experiment per size in n_list (strictly increasing, at least two
/// entries) with the other fields of `base`; errors are per-trial
/// |fraction - predicted|.
ConvergenceTable convergence_study(const ExperimentConfig& base, std::span<const std::size_t> n_list);

struct EquivalenceVerdict {
    bool pass = false;
    long double max_gap = 0.0L;
    SizeDistribution greedy;
    SizeDistribution ranking;
};

inline constexpr long double kEquivalenceTolerance = 1e-12L;

/// Exact GREEDY and RANKING size laws on G(n, n, p) for n <= 4.
EquivalenceVerdict equivalence_check(std::size_t n, double p);

struct PhaseRow {
    double c = 0.0;
    double mean_fraction = 0.0;
    double predicted = 0.0;
    double ratio_estimate = 0.0;
    ExperimentReport report;
};

/// One ratio-enabled experiment per grid value (positive, strictly increasing);
/// `base.c`/`base.p` are replaced by each grid point.
std::vector<PhaseRow> phase_scan(const ExperimentConfig& base, std::span<const double> c_grid);

}  // namespace matchflow
