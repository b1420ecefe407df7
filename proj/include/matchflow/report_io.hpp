#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "matchflow/analytics.hpp"
#include "matchflow/harness.hpp"

namespace matchflow {

enum class OutputFormat { csv, json };

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

using Cell = std::variant<std::monostate, std::int64_t, std::uint64_t, double, std::string>;

/// A rectangular result set; rendered either as CSV (header + rows) or as a
/// JSON document {"config": ..., "rows": [...]} with one object per row.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct WriteOptions {
    OutputFormat format = OutputFormat::csv;
    /// Omit the timestamp comment line (CSV) / field (JSON).
    bool deterministic = false;
};

void write_table(std::ostream& out, const Table& table, const nlohmann::ordered_json& config,
                 const WriteOptions& options);

nlohmann::ordered_json config_json(const ExperimentConfig& config);

/// Trial rows plus one summary row (trial = "summary").
/// Columns: algo, n, c, p, trial, seed, matched, fraction, predicted,
/// abs_error, max_matching, ratio; weighted runs append matched_rank_<r>.
Table trials_table(const ExperimentReport& report);

/// Columns: c, oblivious_frac, greedy_frac, max_match_bound,
/// ratio_oblivious_lb, ratio_greedy_lb.
Table predictions_table(std::span<const PredictionPoint> points);

/// Columns: n, trials, mean_abs_error, max_abs_error.
Table convergence_table(const ConvergenceTable& table);

/// Columns: c, mean_fraction, predicted, ratio_estimate.
Table phase_table(std::span<const PhaseRow> rows);

/// Columns: rank, proportion, bins, mean_fraction, predicted, abs_error.
Table weighted_table(const ExperimentReport& report);

/// Columns: tau, z_1..z_m (integrated), closed_1..closed_m.
Table trajectory_table(const OdeTrajectory& trajectory, const VectorField& field, double c);

}  // namespace matchflow
