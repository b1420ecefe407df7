#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "matchflow/analytics.hpp"
#include "matchflow/harness.hpp"
#include "matchflow/oracle.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using namespace matchflow;

std::vector<double> as_doubles(const SizeDistribution& dist) {
    return {dist.probabilities.begin(), dist.probabilities.end()};
}

ExperimentConfig make_config(const std::string& algo, std::size_t n, std::optional<double> c,
                             std::optional<double> p, std::size_t trials, std::uint64_t seed,
                             std::optional<std::vector<double>> g, bool max_matching,
                             std::size_t threads) {
    ExperimentConfig config;
    config.algo = parse_algorithm(algo);
    config.n = n;
    config.c = c;
    config.p = p;
    config.trials = trials;
    config.seed = seed;
    if (g) {
        config.rank_profile = RankProfile::from_proportions(*g, n);
    }
    config.compute_max_matching = max_matching;
    config.parallelism = threads;
    return config;
}

py::dict report_dict(const ExperimentReport& report) {
    py::list trials;
    for (const TrialRecord& rec : report.per_trial) {
        trials.append(py::dict("trial"_a = rec.trial, "matched"_a = rec.matched,
                               "fraction"_a = rec.fraction, "max_matching"_a = rec.max_matching,
                               "ratio"_a = rec.ratio, "per_rank_matched"_a = rec.per_rank_matched));
    }
    return py::dict("trials"_a = trials, "mean_fraction"_a = report.mean_fraction,
                    "stderr_fraction"_a = report.stderr_fraction,
                    "predicted_fraction"_a = report.predicted_fraction,
                    "abs_error"_a = report.abs_error, "ratio_of_means"_a = report.ratio_of_means,
                    "per_rank_means"_a = report.per_rank_means,
                    "per_rank_predicted"_a = report.per_rank_predicted);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Greedy online bipartite matching on G(n,n,p): simulation and limiting formulas";

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    m.def("oblivious_fraction", &oblivious_fraction, "c"_a);
    m.def("greedy_fraction", &greedy_fraction, "c"_a);
    m.def("max_matching_bound", &max_matching_bound, "c"_a);
    m.def(
        "gamma_fixed_point",
        [](double c) {
            const GammaPair g = gamma_fixed_point(c);
            return py::dict("c"_a = g.c, "gamma_lower"_a = g.gamma_lower,
                            "gamma_upper"_a = g.gamma_upper, "residual"_a = g.residual);
        },
        "c"_a);
    m.def(
        "ratio_lower_bound",
        [](const std::string& algo, double c) {
            if (algo != "oblivious" && algo != "greedy") {
                throw py::value_error("algo must be 'oblivious' or 'greedy'");
            }
            return ratio_lower_bound(
                algo == "greedy" ? RatioAlgorithm::greedy : RatioAlgorithm::oblivious, c);
        },
        "algo"_a, "c"_a);
    m.def(
        "minimize_greedy_ratio",
        [](double lo, double hi) {
            const RatioMinimum r = minimize_greedy_ratio(lo, hi);
            return py::make_tuple(r.c_star, r.value);
        },
        "lo"_a = 0.5, "hi"_a = 5.0);
    m.def(
        "weighted_fraction",
        [](double c, const std::vector<std::size_t>& rank_counts, std::size_t r, double tau) {
            return weighted_fraction(c, RankProfile::from_counts(rank_counts), r, tau);
        },
        "c"_a, "rank_counts"_a, "r"_a, "tau"_a = 1.0);
    m.def(
        "ode_solve",
        [](const std::string& field, double c, std::size_t steps,
           std::optional<std::vector<std::size_t>> rank_counts) {
            if (field == "weighted" && !rank_counts) {
                throw py::value_error("the weighted field needs rank_counts");
            }
            const VectorField vf = field == "oblivious" ? VectorField::oblivious()
                                   : field == "greedy"  ? VectorField::greedy()
                                   : VectorField::weighted(RankProfile::from_counts(*rank_counts));
            const OdeTrajectory traj = ode_solve(vf, c, steps);
            return py::make_tuple(traj.tau_grid, traj.values);
        },
        "field"_a, "c"_a, "steps"_a = 10000, "rank_counts"_a = py::none());

    m.def(
        "sample_instance",
        [](std::size_t n, double c, std::uint64_t seed, std::uint64_t stream_id) {
            const BipartiteInstance inst =
                sample_instance(GraphParams::balanced_c(n, c), RngSeed{seed, stream_id});
            std::vector<std::vector<BinId>> rows;
            for (const auto& row : inst.adjacency) rows.push_back(row.bins);
            return rows;
        },
        "n"_a, "c"_a, "seed"_a, "stream_id"_a = 0);
    m.def(
        "max_matching",
        [](std::size_t n_bins, const std::vector<std::vector<BinId>>& rows) {
            BipartiteInstance inst{GraphParams::with_probability(n_bins, rows.size(), 0.5), {}};
            for (std::size_t t = 0; t < rows.size(); ++t) {
                inst.adjacency.push_back(make_neighbor_set(static_cast<BallId>(t), rows[t], n_bins));
            }
            return max_matching(inst);
        },
        "n_bins"_a, "rows"_a);
    m.def(
        "exact_online_distribution",
        [](std::size_t n, double p, const std::string& algo) {
            return as_doubles(exact_online_distribution(n, p, parse_algorithm(algo)));
        },
        "n"_a, "p"_a, "algo"_a);
    m.def(
        "equivalence_check",
        [](std::size_t n, double p) {
            const EquivalenceVerdict v = equivalence_check(n, p);
            return py::dict("pass"_a = v.pass, "max_gap"_a = static_cast<double>(v.max_gap),
                            "greedy"_a = as_doubles(v.greedy), "ranking"_a = as_doubles(v.ranking));
        },
        "n"_a, "p"_a);
    m.def(
        "run_experiment",
        [](const std::string& algo, std::size_t n, std::optional<double> c,
           std::optional<double> p, std::size_t trials, std::uint64_t seed,
           std::optional<std::vector<double>> g, bool max_matching, std::size_t threads) {
            const ExperimentConfig config =
                make_config(algo, n, c, p, trials, seed, g, max_matching, threads);
            ExperimentReport report;
            {
                py::gil_scoped_release release;
                report = run_experiment(config);
            }
            return report_dict(report);
        },
        "algo"_a, "n"_a, "c"_a = py::none(), "p"_a = py::none(), "trials"_a = 10, "seed"_a = 1,
        "g"_a = py::none(), "max_matching"_a = false, "threads"_a = 0);
}
