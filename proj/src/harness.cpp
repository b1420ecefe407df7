#include "matchflow/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "matchflow/analytics.hpp"

namespace matchflow {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double effective_c(const ExperimentConfig& config) {
    return config.c ? *config.c : *config.p * static_cast<double>(config.n);
}

TrialRecord run_trial(const ExperimentConfig& config, const GraphParams& params,
                      std::size_t trial) {
    TrialRecord rec;
    rec.trial = trial;
    rec.seed = RngSeed{config.seed, static_cast<std::uint64_t>(trial)};
    Rng rng(rec.seed);

    BipartiteInstance sampled = sample_instance(params, rng);
    ArrivalStream stream{params, std::move(sampled.adjacency)};

    MatchResult result;
    switch (config.algo) {
        case Algorithm::oblivious: result = run_oblivious(stream, rng); break;
        case Algorithm::greedy: result = run_greedy(stream, rng); break;
        case Algorithm::ranking: {
            const std::vector<BinId> order = random_bin_order(params.n_bins(), rng);
            result = run_ranking(stream, order);
            break;
        }
        case Algorithm::weighted: {
            RankedMatchResult ranked = run_vertex_weighted(stream, *config.rank_profile, rng);
            rec.per_rank_matched = std::move(ranked.per_rank_matched);
            result = std::move(ranked.base);
            break;
        }
    }
    rec.matched = result.matched_count;
    rec.fraction = static_cast<double>(rec.matched) / static_cast<double>(config.n);

    if (config.compute_max_matching) {
        const BipartiteInstance instance{params, std::move(stream.arrivals)};
        const RatioSample sample = empirical_ratio(instance, result);
        rec.max_matching = sample.maximum;
        rec.ratio = sample.ratio;
    }
    return rec;
}

std::size_t worker_count(const ExperimentConfig& config) {
    std::size_t workers = config.parallelism;
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    return std::min(workers, config.trials);
}

}  // namespace

void validate(const ExperimentConfig& config) {
    if (config.n < 1) {
        throw std::invalid_argument("experiment: n must be at least 1");
    }
    if (config.trials < 1) {
        throw std::invalid_argument("experiment: trials must be at least 1");
    }
    if (config.c.has_value() == config.p.has_value()) {
        throw std::invalid_argument("experiment: set exactly one of c and p");
    }
    if (config.algo == Algorithm::weighted) {
        if (!config.rank_profile) {
            throw std::invalid_argument("experiment: weighted runs need a rank profile");
        }
        if (config.rank_profile->n_bins() != config.n) {
            throw std::invalid_argument("experiment: rank profile covers " +
                                        std::to_string(config.rank_profile->n_bins()) +
                                        " bins but n = " + std::to_string(config.n));
        }
    }
    (void)graph_params(config);
}

GraphParams graph_params(const ExperimentConfig& config) {
    return config.c ? GraphParams::balanced_c(config.n, *config.c)
                    : GraphParams::balanced_p(config.n, *config.p);
}

double predicted_fraction(const ExperimentConfig& config) {
    const double c = effective_c(config);
    switch (config.algo) {
        case Algorithm::oblivious: return oblivious_fraction(c);
        case Algorithm::greedy:
        case Algorithm::ranking: return greedy_fraction(c);
        case Algorithm::weighted: {
            CompensatedSum total;
            for (std::size_t r = 1; r <= config.rank_profile->num_ranks(); ++r) {
                total.add(weighted_fraction(c, *config.rank_profile, r, 1.0));
            }
            return total.value();
        }
    }
    return 0.0;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    validate(config);
    const GraphParams params = graph_params(config);

    ExperimentReport report;
    report.config = config;
    report.per_trial.resize(config.trials);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= config.trials) {
                return;
            }
            try {
                report.per_trial[k] = run_trial(config, params, k);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = config.trials;
                return;
            }
        }
    };
    {
        const std::size_t workers = worker_count(config);
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) {
            pool.emplace_back(work);
        }
        work();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    // Aggregate in trial order so results never depend on scheduling.
    const double trials = static_cast<double>(config.trials);
    CompensatedSum fraction_sum;
    CompensatedSum matched_sum;
    CompensatedSum maximum_sum;
    for (const TrialRecord& rec : report.per_trial) {
        fraction_sum.add(rec.fraction);
        matched_sum.add(static_cast<double>(rec.matched));
        if (rec.max_matching) {
            maximum_sum.add(static_cast<double>(*rec.max_matching));
        }
    }
    report.mean_fraction = fraction_sum.value() / trials;
    report.mean_matched = matched_sum.value() / trials;
    if (config.trials > 1) {
        CompensatedSum squares;
        for (const TrialRecord& rec : report.per_trial) {
            const double d = rec.fraction - report.mean_fraction;
            squares.add(d * d);
        }
        report.stderr_fraction = std::sqrt(squares.value() / (trials - 1.0)) / std::sqrt(trials);
    }
    if (config.compute_max_matching) {
        report.mean_max_matching = maximum_sum.value() / trials;
        if (*report.mean_max_matching > 0.0) {
            report.ratio_of_means = report.mean_matched / *report.mean_max_matching;
        }
    }

    report.predicted_fraction = predicted_fraction(config);
    report.abs_error = std::fabs(report.mean_fraction - report.predicted_fraction);

    if (config.algo == Algorithm::weighted) {
        const std::size_t m = config.rank_profile->num_ranks();
        const double c = effective_c(config);
        for (std::size_t r = 0; r < m; ++r) {
            CompensatedSum rank_sum;
            for (const TrialRecord& rec : report.per_trial) {
                rank_sum.add(static_cast<double>(rec.per_rank_matched[r]) /
                             static_cast<double>(config.n));
            }
            report.per_rank_means.push_back(rank_sum.value() / trials);
            report.per_rank_predicted.push_back(
                weighted_fraction(c, *config.rank_profile, r + 1, 1.0));
        }
    }
    return report;
}

ConvergenceTable convergence_study(const ExperimentConfig& base,
                                   std::span<const std::size_t> n_list) {
    if (n_list.size() < 2) {
        throw std::invalid_argument("convergence_study: need at least two sizes");
    }
    for (std::size_t i = 1; i < n_list.size(); ++i) {
        if (n_list[i] <= n_list[i - 1]) {
            throw std::invalid_argument("convergence_study: sizes must be strictly increasing");
        }
    }
    ConvergenceTable table;
    for (std::size_t n : n_list) {
        ExperimentConfig config = base;
        config.n = n;
        if (config.rank_profile) {
            config.rank_profile =
                RankProfile::from_proportions(config.rank_profile->proportions(), n);
        }
        const ExperimentReport report = run_experiment(config);

        ConvergenceRow row;
        row.n = n;
        row.trials = config.trials;
        CompensatedSum errors;
        for (const TrialRecord& rec : report.per_trial) {
            const double err = std::fabs(rec.fraction - report.predicted_fraction);
            errors.add(err);
            row.max_abs_error = std::max(row.max_abs_error, err);
        }
        row.mean_abs_error = errors.value() / static_cast<double>(config.trials);
        table.rows.push_back(row);
    }
    return table;
}

EquivalenceVerdict equivalence_check(std::size_t n, double p) {
    EquivalenceVerdict verdict;
    verdict.greedy = exact_online_distribution(n, p, Algorithm::greedy);
    verdict.ranking = exact_online_distribution(n, p, Algorithm::ranking);
    verdict.max_gap = max_gap(verdict.greedy, verdict.ranking);
    verdict.pass = verdict.max_gap < kEquivalenceTolerance;
    return verdict;
}

std::vector<PhaseRow> phase_scan(const ExperimentConfig& base, std::span<const double> c_grid) {
    if (c_grid.empty()) {
        throw std::invalid_argument("phase_scan: empty c grid");
    }
    for (std::size_t i = 0; i < c_grid.size(); ++i) {
        if (!(c_grid[i] > 0.0) || (i > 0 && !(c_grid[i] > c_grid[i - 1]))) {
            throw std::invalid_argument("phase_scan: c grid must be positive and increasing");
        }
    }
    std::vector<PhaseRow> rows;
    for (double c : c_grid) {
        ExperimentConfig config = base;
        config.c = c;
        config.p.reset();
        config.compute_max_matching = true;
        PhaseRow row;
        row.c = c;
        row.report = run_experiment(config);
        row.mean_fraction = row.report.mean_fraction;
        row.predicted = row.report.predicted_fraction;
        row.ratio_estimate = row.report.ratio_of_means.value_or(1.0);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace matchflow
