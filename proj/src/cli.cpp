#include "matchflow/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

#include "matchflow/analytics.hpp"
#include "matchflow/harness.hpp"
#include "matchflow/report_io.hpp"

namespace matchflow::cli {

namespace {

/// Bad flag values detected after parsing; maps to kExitUsage.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunFlags {
    std::string algo = "greedy";
    std::size_t n = 0;
    std::optional<double> c;
    std::optional<double> p;
    std::size_t trials = 10;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
};

struct OutputFlags {
    std::string out;
    std::string format = "csv";
    bool deterministic = false;
};

double parse_number(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + text + "'");
    }
    if (used != text.size()) {
        throw UsageError("not a number: '" + text + "'");
    }
    return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, sep)) {
        parts.push_back(part);
    }
    if (!text.empty() && text.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

/// "lo:hi:step" (lo > 0, step > 0, hi >= lo) or a comma list "a,b,c".
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) {
            throw UsageError("grid must look like lo:hi:step, got '" + text + "'");
        }
        const double lo = parse_number(parts[0]);
        const double hi = parse_number(parts[1]);
        const double step = parse_number(parts[2]);
        if (!(lo > 0.0)) throw UsageError("grid lower end must be positive");
        if (!(step > 0.0)) throw UsageError("grid step must be positive");
        if (!(hi >= lo)) throw UsageError("grid upper end must be >= lower end");
        const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (std::size_t k = 0; k < count; ++k) {
            grid.push_back(lo + static_cast<double>(k) * step);
        }
    } else {
        for (const auto& part : split(text, ',')) {
            grid.push_back(parse_number(part));
        }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw UsageError("grid values must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw UsageError("grid must be increasing");
    }
    if (grid.empty()) throw UsageError("empty grid");
    return grid;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    for (const auto& part : split(text, ',')) {
        values.push_back(parse_number(part));
    }
    return values;
}

std::size_t resolve_threads(std::size_t flag) {
    if (const char* env = std::getenv("MATCHFLOW_THREADS")) {
        try {
            return static_cast<std::size_t>(std::stoul(env));
        } catch (const std::exception&) {
            // Unparseable values fall back to the flag.
        }
    }
    return flag;
}

ExperimentConfig make_config(const RunFlags& flags) {
    if (flags.c.has_value() == flags.p.has_value()) {
        throw UsageError("exactly one of --c and --p is required");
    }
    ExperimentConfig config;
    config.algo = parse_algorithm(flags.algo);
    config.n = flags.n;
    config.c = flags.c;
    config.p = flags.p;
    config.trials = flags.trials;
    config.seed = flags.seed;
    config.parallelism = resolve_threads(flags.threads);
    return config;
}

WriteOptions write_options(const OutputFlags& flags) {
    return WriteOptions{flags.format == "json" ? OutputFormat::json : OutputFormat::csv,
                        flags.deterministic};
}

// Writes to the --out file, or to `out` when no file was named.
void emit(const OutputFlags& flags, std::ostream& out, const Table& table,
          const nlohmann::ordered_json& config) {
    if (flags.out.empty()) {
        write_table(out, table, config, write_options(flags));
        return;
    }
    std::ofstream file(flags.out, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open output file '" + flags.out + "'");
    }
    write_table(file, table, config, write_options(flags));
    if (!file) {
        throw std::runtime_error("failed writing '" + flags.out + "'");
    }
}

void emit_plot_data(const std::string& path, const VectorField& field, double c,
                    std::size_t steps, bool deterministic) {
    const OdeTrajectory traj = ode_solve(field, c, steps);
    OutputFlags flags{path, "csv", deterministic};
    nlohmann::ordered_json config;
    config["c"] = c;
    config["steps"] = steps;
    std::ostringstream sink;
    emit(flags, sink, trajectory_table(traj, field, c), config);
}

void add_run_flags(CLI::App* sub, RunFlags& flags, bool with_algo,
                   const std::vector<std::string>& algos) {
    if (with_algo) {
        sub->add_option("--algo", flags.algo, "Online algorithm")
            ->check(CLI::IsMember(algos))
            ->capture_default_str();
    }
    auto* c = sub->add_option("--c", flags.c, "Mean degree (p = c/n)");
    auto* p = sub->add_option("--p", flags.p, "Raw edge probability");
    c->excludes(p);
    p->excludes(c);
    sub->add_option("--trials", flags.trials, "Number of trials")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--seed", flags.seed, "Base seed")->capture_default_str();
    sub->add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
}

void add_output_flags(CLI::App* sub, OutputFlags& flags) {
    sub->add_option("--out", flags.out, "Output file (default: stdout)");
    sub->add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_flag("--deterministic", flags.deterministic, "Omit the timestamp header");
}

void log_summary(std::ostream& log, const ExperimentReport& report) {
    log << to_string(report.config.algo) << " n=" << report.config.n
        << " trials=" << report.config.trials
        << " mean_fraction=" << format_double(report.mean_fraction)
        << " stderr=" << format_double(report.stderr_fraction)
        << " predicted=" << format_double(report.predicted_fraction)
        << " abs_error=" << format_double(report.abs_error);
    if (report.ratio_of_means) {
        log << " ratio=" << format_double(*report.ratio_of_means);
    }
    log << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulator and analytics for greedy online bipartite matching on G(n,n,p)",
                 "matchflow"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

    // simulate
    RunFlags sim;
    OutputFlags sim_out;
    bool sim_ratio = false;
    std::string sim_plot;
    std::size_t ode_steps = 10000;
    auto* simulate = app.add_subcommand("simulate", "Run Monte-Carlo trials of one algorithm");
    add_run_flags(simulate, sim, true, {"oblivious", "greedy", "ranking"});
    simulate->add_option("--n", sim.n, "Bins (= balls)")->required()->check(CLI::PositiveNumber);
    simulate->add_flag("--ratio", sim_ratio, "Also compute the maximum matching per instance");
    simulate->add_option("--plot-data", sim_plot, "Write the (tau, z(tau)) ODE trajectory here");
    simulate->add_option("--steps", ode_steps, "RK4 steps for --plot-data")->capture_default_str();
    add_output_flags(simulate, sim_out);

    // predict
    std::string predict_grid;
    OutputFlags predict_out;
    auto* predict_cmd = app.add_subcommand("predict", "Tabulate the limiting formulas over c");
    predict_cmd->add_option("--c-grid", predict_grid, "lo:hi:step or comma list")->required();
    add_output_flags(predict_cmd, predict_out);

    // ratio
    bool ratio_min = false;
    std::optional<double> ratio_c;
    std::string ratio_algo = "both";
    double ratio_lo = 0.5;
    double ratio_hi = 5.0;
    auto* ratio_cmd = app.add_subcommand("ratio", "Performance-ratio lower bounds");
    auto* min_flag = ratio_cmd->add_flag("--min", ratio_min, "Minimise the greedy bound");
    auto* c_opt = ratio_cmd->add_option("--c", ratio_c, "Evaluate the bounds at c");
    min_flag->excludes(c_opt);
    c_opt->excludes(min_flag);
    ratio_cmd->add_option("--algo", ratio_algo, "Which bound to print with --c")
        ->check(CLI::IsMember({"oblivious", "greedy", "both"}));
    ratio_cmd->add_option("--lo", ratio_lo, "Search interval start for --min")->capture_default_str();
    ratio_cmd->add_option("--hi", ratio_hi, "Search interval end for --min")->capture_default_str();

    // equiv
    std::size_t equiv_n = 0;
    double equiv_p = 0.0;
    auto* equiv = app.add_subcommand("equiv", "Exact GREEDY vs RANKING size-law comparison");
    equiv->add_option("--n", equiv_n, "Instance size (<= 4)")->required();
    equiv->add_option("--p", equiv_p, "Edge probability")->required()->check(CLI::Range(0.0, 1.0));

    // convergence
    RunFlags conv;
    OutputFlags conv_out;
    std::string conv_sizes;
    auto* convergence = app.add_subcommand("convergence", "Error against the formula versus n");
    add_run_flags(convergence, conv, true, {"oblivious", "greedy", "ranking"});
    convergence->add_option("--n-list", conv_sizes, "Comma list of increasing sizes")->required();
    add_output_flags(convergence, conv_out);

    // phase-scan
    RunFlags scan;
    OutputFlags scan_out;
    std::string scan_grid;
    auto* phase = app.add_subcommand("phase-scan", "Ratio estimates across a c grid");
    add_run_flags(phase, scan, true, {"oblivious", "greedy", "ranking"});
    phase->add_option("--n", scan.n, "Bins (= balls)")->required()->check(CLI::PositiveNumber);
    phase->add_option("--c-grid", scan_grid, "lo:hi:step or comma list")->required();
    add_output_flags(phase, scan_out);

    // weighted
    RunFlags wt;
    OutputFlags wt_out;
    std::size_t wt_ranks = 0;
    std::string wt_g;
    std::string wt_rank_out;
    std::string wt_plot;
    auto* weighted = app.add_subcommand("weighted", "Vertex-weighted greedy with rank classes");
    add_run_flags(weighted, wt, false, {});
    weighted->add_option("--n", wt.n, "Bins (= balls)")->required()->check(CLI::PositiveNumber);
    weighted->add_option("--ranks", wt_ranks, "Number of rank classes m")
        ->required()
        ->check(CLI::PositiveNumber);
    weighted->add_option("--g", wt_g, "Comma list of rank proportions (default uniform)");
    weighted->add_option("--rank-out", wt_rank_out, "Write the per-rank summary table here");
    weighted->add_option("--plot-data", wt_plot, "Write the (tau, z(tau)) ODE trajectory here");
    weighted->add_option("--steps", ode_steps, "RK4 steps for --plot-data")->capture_default_str();
    add_output_flags(weighted, wt_out);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const auto started = std::chrono::steady_clock::now();
        auto elapsed = [&] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        };

        if (simulate->parsed()) {
            ExperimentConfig config = make_config(sim);
            config.n = sim.n;
            config.compute_max_matching = sim_ratio;
            validate(config);
            const ExperimentReport report = run_experiment(config);
            emit(sim_out, out, trials_table(report), config_json(config));
            if (!sim_out.out.empty()) log_summary(out, report);
            if (!sim_plot.empty()) {
                const VectorField field = config.algo == Algorithm::oblivious
                                              ? VectorField::oblivious()
                                              : VectorField::greedy();
                const double c = config.c ? *config.c : *config.p * static_cast<double>(config.n);
                emit_plot_data(sim_plot, field, c, ode_steps, sim_out.deterministic);
            }
            if (verbose) err << "simulate finished in " << elapsed() << " s\n";
            return kExitOk;
        }

        if (predict_cmd->parsed()) {
            std::vector<PredictionPoint> points;
            for (double c : parse_grid(predict_grid)) {
                points.push_back(predict(c));
            }
            nlohmann::ordered_json config;
            config["c_grid"] = predict_grid;
            emit(predict_out, out, predictions_table(points), config);
            return kExitOk;
        }

        if (ratio_cmd->parsed()) {
            if (ratio_min == ratio_c.has_value()) {
                throw UsageError("ratio needs exactly one of --min or --c");
            }
            if (ratio_min) {
                const RatioMinimum m = minimize_greedy_ratio(ratio_lo, ratio_hi);
                out << "c_star=" << format_double(m.c_star) << " value=" << format_double(m.value)
                    << '\n';
                return kExitOk;
            }
            if (!(*ratio_c > 0.0)) throw UsageError("--c must be positive");
            if (ratio_algo != "greedy") {
                out << "oblivious=" << format_double(ratio_lower_bound(RatioAlgorithm::oblivious, *ratio_c))
                    << '\n';
            }
            if (ratio_algo != "oblivious") {
                out << "greedy=" << format_double(ratio_lower_bound(RatioAlgorithm::greedy, *ratio_c))
                    << '\n';
            }
            return kExitOk;
        }

        if (equiv->parsed()) {
            if (equiv_n < 1 || equiv_n > kMaxEnumerationSize) {
                throw UsageError("--n must be between 1 and " + std::to_string(kMaxEnumerationSize));
            }
            const EquivalenceVerdict verdict = equivalence_check(equiv_n, equiv_p);
            out << (verdict.pass ? "pass" : "FAIL") << " n=" << equiv_n
                << " p=" << format_double(equiv_p)
                << " max_gap=" << format_double(static_cast<double>(verdict.max_gap)) << '\n';
            return verdict.pass ? kExitOk : kExitFailure;
        }

        if (convergence->parsed()) {
            std::vector<std::size_t> sizes;
            for (double v : parse_list(conv_sizes)) {
                if (!(v >= 1.0) || v != std::floor(v)) throw UsageError("--n-list needs positive integers");
                sizes.push_back(static_cast<std::size_t>(v));
            }
            if (sizes.size() < 2) throw UsageError("--n-list needs at least two sizes");
            ExperimentConfig config = make_config(conv);
            config.n = sizes.front();
            validate(config);
            const ConvergenceTable table = convergence_study(config, sizes);
            nlohmann::ordered_json echo = config_json(config);
            echo["n_list"] = sizes;
            emit(conv_out, out, convergence_table(table), echo);
            if (verbose) err << "convergence finished in " << elapsed() << " s\n";
            return kExitOk;
        }

        if (phase->parsed()) {
            const std::vector<double> grid = parse_grid(scan_grid);
            RunFlags flags = scan;
            if (!flags.c && !flags.p) flags.c = grid.front();
            ExperimentConfig config = make_config(flags);
            config.n = scan.n;
            validate(config);
            const std::vector<PhaseRow> rows = phase_scan(config, grid);
            nlohmann::ordered_json echo = config_json(config);
            echo["c_grid"] = grid;
            emit(scan_out, out, phase_table(rows), echo);
            if (verbose) err << "phase-scan finished in " << elapsed() << " s\n";
            return kExitOk;
        }

        if (weighted->parsed()) {
            std::vector<double> g = wt_g.empty() ? std::vector<double>(wt_ranks, 1.0)
                                                 : parse_list(wt_g);
            if (g.size() != wt_ranks) {
                throw UsageError("--g lists " + std::to_string(g.size()) +
                                 " proportions but --ranks is " + std::to_string(wt_ranks));
            }
            ExperimentConfig config = make_config(wt);
            config.algo = Algorithm::weighted;
            config.n = wt.n;
            config.rank_profile = RankProfile::from_proportions(g, wt.n);
            validate(config);
            const ExperimentReport report = run_experiment(config);
            emit(wt_out, out, trials_table(report), config_json(config));
            if (!wt_rank_out.empty()) {
                OutputFlags rank_flags{wt_rank_out, wt_out.format, wt_out.deterministic};
                emit(rank_flags, out, weighted_table(report), config_json(config));
            }
            if (!wt_out.out.empty()) {
                log_summary(out, report);
                for (std::size_t r = 0; r < report.per_rank_means.size(); ++r) {
                    out << "rank " << r + 1 << " mean_fraction=" << format_double(report.per_rank_means[r])
                        << " predicted=" << format_double(report.per_rank_predicted[r]) << '\n';
                }
            }
            if (!wt_plot.empty()) {
                const double c = config.c ? *config.c : *config.p * static_cast<double>(config.n);
                emit_plot_data(wt_plot, VectorField::weighted(*config.rank_profile), c, ode_steps,
                               wt_out.deterministic);
            }
            if (verbose) err << "weighted finished in " << elapsed() << " s\n";
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace matchflow::cli
