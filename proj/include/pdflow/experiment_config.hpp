#pragma once

// JSON experiment descriptions for the command-line runner.
//
// {
//   "name": "...",
//   "problem": {"type": "toy", "m": 5, "n": 10, "e": 6}
//            | {"type": "quadratic", "Q": [[...]], "q": [...], "A": [[...]], "b": [...]}
//            | {"type": "rank_one_squared", "c": [...], "A": [[...]], "b": [...]},
//   "rho": 1,
//   "system": "ihd" | "ihdtr" | "baseline",
//   "schedule": {"alpha": 3.1, "gamma": 1, "beta": -0.5,
//                "xi": {"c": 1, "p": 0},
//                "eps": {"type": "zero"} | {"type": "inverse_power", "a": 1, "r": 1.5}},
//   "initial": {"t0": 1, "x": [...], "lambda": [...], "vx": [...], "vlambda": [...]},
//   "integrator": {"method": "bs23", "rtol": 1e-6, "atol": 1e-9, "h_init": 1e-3,
//                  "h_min": 1e-14, "h_max": 0.1, "t_end": 50, "sample_every": 0.05},
//   "output": {"dir": "out", "svg": true},
//   "rates": {"window": [10, 50]}
// }
//
// A comparison file holds {"name", "base": <experiment>, "runs": [{"label", "patch"}]}
// where each patch is merged into the base (RFC 7396).

#include "pdflow/dynamics.hpp"
#include "pdflow/integrator.hpp"
#include "pdflow/problem.hpp"
#include "pdflow/schedule.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdflow {

/// Invalid configuration; `pointer` is the JSON pointer of the offending value.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& pointer, const std::string& msg)
        : std::invalid_argument((pointer.empty() ? std::string("/") : pointer) + ": " + msg),
          pointer_(pointer),
          message_(msg) {}
    const std::string& pointer() const { return pointer_; }
    const std::string& message() const { return message_; }

private:
    std::string pointer_;
    std::string message_;
};

struct ProblemSpec {
    std::string type = "toy";
    double m = 5.0, n = 10.0, e = 6.0;
    Matrix Q, A;
    Vector q, b, c;
};

struct InitialState {
    double t0 = 1.0;
    PhaseVector z;
};

struct ExperimentConfig {
    std::string name;
    ProblemSpec problem;
    double rho = 1.0;
    SystemKind system = SystemKind::IHDTR;
    CoefficientSchedule schedule;
    InitialState initial;
    IntegratorConfig integrator;
    std::string output_dir = "out";
    bool svg = true;
    std::optional<std::pair<double, double>> rate_window;

    Problem build_problem() const;
    /// Default [10, t_end] when t_end > 20, otherwise the second half of the run.
    std::pair<double, double> effective_rate_window() const;
};

struct CompareRun {
    std::string label;
    ExperimentConfig config;
};

struct CompareConfig {
    std::string name;
    std::vector<CompareRun> runs;
};

ExperimentConfig parse_experiment(const nlohmann::json& j);
CompareConfig parse_compare(const nlohmann::json& j);
bool is_compare_document(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentConfig& cfg);

nlohmann::json load_json_file(const std::string& path);

}  // namespace pdflow
