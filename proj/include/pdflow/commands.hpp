#pragma once

// Command implementations behind the pdflow executable. Each command writes
// human-readable output to `out`, problems to `err`, and returns an exit code.

#include "pdflow/conditions.hpp"
#include "pdflow/diagnostics.hpp"
#include "pdflow/experiment_config.hpp"
#include "pdflow/tikhonov_path.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace pdflow {

struct RateSummary {
    std::string metric;
    std::optional<RateFit> fit;  ///< empty when the window holds too few points
    double growth = 0.0;         ///< sup of scale * metric over the late half of [t2, T] / sup over the early half
};

struct RunResult {
    ExperimentConfig config;
    SaddlePoint saddle;
    Trajectory trajectory;
    std::vector<DiagnosticsRecord> records;
    std::optional<DescentReport> descent;
    std::vector<RateSummary> rates;  ///< gap_xhat, feas_xhat (scale t^2 xi), vel_norm (scale t)
    long oscillations = 0;           ///< smoothed local maxima of feas_xhat
    long ball_crossings = 0;         ///< of the sphere of radius ||x*||
    IntegralEstimates integrals;
    double seconds = 0.0;
    std::string failure;  ///< integration error message; the trajectory is then partial

    double final_x_norm() const;
    const DiagnosticsRecord& final_record() const { return records.back(); }
};

/// Simulates one configuration and evaluates all diagnostics. Integration
/// failures are reported through `failure` with the partial trajectory.
RunResult run_experiment(const ExperimentConfig& cfg);

/// summary.json contents (deterministic: no timings).
nlohmann::json summary_json(const RunResult& r);

nlohmann::json condition_report_json(const ConditionReport& r);

int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

int cmd_compare(const CompareConfig& cc, const std::string& out_dir, bool svg, std::ostream& out, std::ostream& err);

int cmd_check(const CoefficientSchedule& s, bool as_json, std::ostream& out);

/// Fits every column in `columns` (all metric columns when empty) against t.
int cmd_rates(const std::string& csv_path, std::pair<double, double> window, const std::vector<std::string>& columns,
              std::ostream& out, std::ostream& err);

int cmd_tikhonov(const Problem& p, const std::vector<double>& grid, const std::string& out_dir, std::ostream& out,
                 std::ostream& err);

/// Lower-case label with characters outside [a-z0-9_.-] replaced by '_'.
std::string sanitize_label(const std::string& label);

}  // namespace pdflow
