#include "matchflow/report_io.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace matchflow {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string quoted = "\"";
    for (char ch : s) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

std::string cell_text(const Cell& cell) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(std::uint64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(const std::string& v) const { return csv_field(v); }
    };
    return std::visit(Visitor{}, cell);
}

nlohmann::ordered_json cell_json(const Cell& cell) {
    using nlohmann::ordered_json;
    struct Visitor {
        ordered_json operator()(std::monostate) const { return nullptr; }
        ordered_json operator()(std::int64_t v) const { return v; }
        ordered_json operator()(std::uint64_t v) const { return v; }
        ordered_json operator()(double v) const {
            return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
        }
        ordered_json operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

std::string timestamp_utc() {
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    const auto days = std::chrono::floor<std::chrono::days>(now);
    const std::chrono::year_month_day ymd{days};
    const std::chrono::hh_mm_ss hms{now - days};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

Cell count(std::size_t v) { return static_cast<std::int64_t>(v); }

template <typename T>
Cell maybe(const std::optional<T>& v) {
    if (!v) return std::monostate{};
    if constexpr (std::is_floating_point_v<T>) {
        return static_cast<double>(*v);
    } else {
        return static_cast<std::int64_t>(*v);
    }
}

double config_p(const ExperimentConfig& config) {
    return config.p ? *config.p : *config.c / static_cast<double>(config.n);
}

double config_c(const ExperimentConfig& config) {
    return config.c ? *config.c : *config.p * static_cast<double>(config.n);
}

}  // namespace

std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf.data(), end);
}

void write_table(std::ostream& out, const Table& table, const nlohmann::ordered_json& config,
                 const WriteOptions& options) {
    if (options.format == OutputFormat::csv) {
        if (!options.deterministic) {
            out << "# matchflow " << timestamp_utc() << '\n';
        }
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            out << (i ? "," : "") << table.columns[i];
        }
        out << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << (i ? "," : "") << cell_text(row[i]);
            }
            out << '\n';
        }
        return;
    }

    nlohmann::ordered_json doc;
    if (!options.deterministic) {
        doc["generated"] = timestamp_utc();
    }
    doc["config"] = config;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            obj[table.columns[i]] = cell_json(row[i]);
        }
        doc["rows"].push_back(std::move(obj));
    }
    out << doc.dump(2) << '\n';
}

nlohmann::ordered_json config_json(const ExperimentConfig& config) {
    nlohmann::ordered_json j;
    j["algo"] = std::string(to_string(config.algo));
    j["n"] = config.n;
    j["c"] = config.c ? nlohmann::ordered_json(*config.c) : nlohmann::ordered_json(nullptr);
    j["p"] = config.p ? nlohmann::ordered_json(*config.p) : nlohmann::ordered_json(nullptr);
    j["trials"] = config.trials;
    j["seed"] = config.seed;
    j["compute_max_matching"] = config.compute_max_matching;
    if (config.rank_profile) {
        j["rank_counts"] = config.rank_profile->counts();
        j["rank_proportions"] = config.rank_profile->proportions();
    }
    return j;
}

Table trials_table(const ExperimentReport& report) {
    const ExperimentConfig& cfg = report.config;
    Table t;
    t.columns = {"algo",      "n",         "c",     "p",        "trial",        "seed",
                 "matched",   "fraction",  "predicted", "abs_error", "max_matching", "ratio"};
    const std::size_t ranks = cfg.rank_profile && cfg.algo == Algorithm::weighted
                                  ? cfg.rank_profile->num_ranks()
                                  : 0;
    for (std::size_t r = 1; r <= ranks; ++r) {
        t.columns.push_back("matched_rank_" + std::to_string(r));
    }

    const std::string algo(to_string(cfg.algo));
    const double c = config_c(cfg);
    const double p = config_p(cfg);
    for (const TrialRecord& rec : report.per_trial) {
        std::vector<Cell> row{algo,
                              count(cfg.n),
                              c,
                              p,
                              count(rec.trial),
                              Cell{rec.seed.seed},
                              count(rec.matched),
                              rec.fraction,
                              report.predicted_fraction,
                              std::fabs(rec.fraction - report.predicted_fraction),
                              maybe(rec.max_matching),
                              maybe(rec.ratio)};
        for (std::size_t r = 0; r < ranks; ++r) {
            row.push_back(count(rec.per_rank_matched[r]));
        }
        t.rows.push_back(std::move(row));
    }

    std::vector<Cell> summary{algo,
                              count(cfg.n),
                              c,
                              p,
                              std::string("summary"),
                              Cell{cfg.seed},
                              report.mean_matched,
                              report.mean_fraction,
                              report.predicted_fraction,
                              report.abs_error,
                              maybe(report.mean_max_matching),
                              maybe(report.ratio_of_means)};
    for (std::size_t r = 0; r < ranks; ++r) {
        summary.push_back(report.per_rank_means[r] * static_cast<double>(cfg.n));
    }
    t.rows.push_back(std::move(summary));
    return t;
}

Table predictions_table(std::span<const PredictionPoint> points) {
    Table t;
    t.columns = {"c",          "oblivious_frac",     "greedy_frac",
                 "max_match_bound", "ratio_oblivious_lb", "ratio_greedy_lb"};
    for (const PredictionPoint& pt : points) {
        t.rows.push_back({pt.c, pt.oblivious_frac, pt.greedy_frac, pt.max_match_bound,
                          pt.ratio_oblivious_lb, pt.ratio_greedy_lb});
    }
    return t;
}

Table convergence_table(const ConvergenceTable& table) {
    Table t;
    t.columns = {"n", "trials", "mean_abs_error", "max_abs_error"};
    for (const ConvergenceRow& row : table.rows) {
        t.rows.push_back({count(row.n), count(row.trials), row.mean_abs_error, row.max_abs_error});
    }
    return t;
}

Table phase_table(std::span<const PhaseRow> rows) {
    Table t;
    t.columns = {"c", "mean_fraction", "predicted", "ratio_estimate"};
    for (const PhaseRow& row : rows) {
        t.rows.push_back({row.c, row.mean_fraction, row.predicted, row.ratio_estimate});
    }
    return t;
}

Table weighted_table(const ExperimentReport& report) {
    if (!report.config.rank_profile || report.per_rank_means.empty()) {
        throw std::invalid_argument("weighted_table: report has no per-rank data");
    }
    const RankProfile& profile = *report.config.rank_profile;
    Table t;
    t.columns = {"rank", "proportion", "bins", "mean_fraction", "predicted", "abs_error"};
    for (std::size_t r = 0; r < profile.num_ranks(); ++r) {
        t.rows.push_back({count(r + 1), profile.proportions()[r], count(profile.counts()[r]),
                          report.per_rank_means[r], report.per_rank_predicted[r],
                          std::fabs(report.per_rank_means[r] - report.per_rank_predicted[r])});
    }
    return t;
}

Table trajectory_table(const OdeTrajectory& trajectory, const VectorField& field, double c) {
    const std::size_t dim = field.dimension();
    Table t;
    t.columns = {"tau"};
    for (std::size_t d = 1; d <= dim; ++d) t.columns.push_back("z_" + std::to_string(d));
    for (std::size_t d = 1; d <= dim; ++d) t.columns.push_back("closed_" + std::to_string(d));
    for (std::size_t i = 0; i < trajectory.tau_grid.size(); ++i) {
        const double tau = trajectory.tau_grid[i];
        std::vector<Cell> row{tau};
        for (double z : trajectory.values[i]) row.push_back(z);
        for (double z : closed_form_state(field, c, tau)) row.push_back(z);
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace matchflow
