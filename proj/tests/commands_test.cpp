#include "pdflow/commands.hpp"
#include "pdflow/csv.hpp"
#include "pdflow/experiments.hpp"
#include "pdflow/svg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pdflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("pdflow_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig short_config(const char* id, double horizon) {
    ExperimentConfig cfg = parse_experiment(find_builtin(id)->document);
    cfg.integrator.t_end = horizon;
    cfg.svg = false;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + std::string(PDFLOW_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Csv, HeaderLayout) {
    const std::vector<std::string> want{"t",        "x_0",       "x_1",         "x_2",      "lam_0", "vx_0",
                                        "vx_1",     "vx_2",      "vlam_0",      "gap_xhat", "feas_xhat",
                                        "iterate_err", "vel_norm", "E",         "E_eps",    "dEdt"};
    EXPECT_EQ(trajectory_header(3, 1), want);
}

TEST(Csv, DoublesSurviveTextRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 4.9e-324, 1.7976931348623157e308, 123456789.123456789}) {
        std::istringstream in("t\n" + format_double(v) + "\n");
        EXPECT_EQ(read_csv(in).rows.at(0).at(0), v);
    }
}

TEST(Csv, MalformedInputNamesTheLine) {
    std::istringstream in("t,a\n1,2\n3,oops\n");
    try {
        read_csv(in);
        FAIL() << "expected an error";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Csv, RateFitFromWrittenFileIsBitwiseEqual) {
    const RunResult r = run_experiment(short_config("exp1_ihd", 30.0));
    const fs::path dir = scratch("roundtrip");
    {
        std::ofstream os(dir / "trajectory.csv");
        write_trajectory_csv(os, r.trajectory, r.records, 3, 1);
    }
    const CsvTable table = read_csv_file((dir / "trajectory.csv").string());
    ASSERT_EQ(table.rows.size(), r.records.size());

    struct Column {
        const char* name;
        double DiagnosticsRecord::*field;
    };
    for (const Column& c : {Column{"gap_xhat", &DiagnosticsRecord::gap_at_xhat},
                            Column{"feas_xhat", &DiagnosticsRecord::feasibility_at_xhat},
                            Column{"vel_norm", &DiagnosticsRecord::velocity_norm}}) {
        MetricSeries from_file;
        for (const auto& row : table.rows) from_file.emplace_back(row[table.column("t")], row[table.column(c.name)]);
        const RateFit a = rate_fit(from_file, {10.0, 30.0});
        const RateFit b = rate_fit(metric_series(r.records, c.field), {10.0, 30.0});
        EXPECT_EQ(a.slope, b.slope) << c.name;
        EXPECT_EQ(a.intercept, b.intercept) << c.name;
        EXPECT_EQ(a.r_squared, b.r_squared) << c.name;

        std::ostringstream out, err;
        ASSERT_EQ(cmd_rates((dir / "trajectory.csv").string(), {10.0, 30.0}, {c.name}, out, err), 0) << err.str();
        EXPECT_NE(out.str().find("(exact " + format_double(b.slope) + ")"), std::string::npos) << out.str();
    }
}

TEST(Determinism, RepeatedRunsAreBitwiseEqual) {
    const ExperimentConfig cfg = short_config("exp1_ihdtr", 20.0);
    const RunResult a = run_experiment(cfg), b = run_experiment(cfg);
    EXPECT_EQ(summary_json(a), summary_json(b));
    std::ostringstream ca, cb;
    write_trajectory_csv(ca, a.trajectory, a.records, 3, 1);
    write_trajectory_csv(cb, b.trajectory, b.records, 3, 1);
    EXPECT_EQ(ca.str(), cb.str());
}

TEST(CmdRun, WritesOutputsAndSummary) {
    ExperimentConfig cfg = short_config("exp1_ihdtr", 10.0);
    cfg.svg = true;
    cfg.output_dir = scratch("run").string();
    std::ostringstream out, err;
    ASSERT_EQ(cmd_run(cfg, out, err), 0) << err.str();
    for (const char* f : {"trajectory.csv", "summary.json", "metrics.svg", "trajectory.svg"}) {
        EXPECT_TRUE(fs::exists(fs::path(cfg.output_dir) / f)) << f;
    }
    const auto summary = load_json_file((fs::path(cfg.output_dir) / "summary.json").string());
    EXPECT_TRUE(summary.contains("descent"));
    EXPECT_NE(slurp(fs::path(cfg.output_dir) / "metrics.svg").find("<svg"), std::string::npos);
}

TEST(CmdRun, IntegrationFailureKeepsPartialCsv) {
    ExperimentConfig cfg = short_config("exp1_ihdtr", 10.0);
    cfg.integrator.rtol = 1e-14;
    cfg.integrator.atol = 1e-17;
    cfg.integrator.h_min = 1e-3;
    cfg.output_dir = scratch("fail").string();
    std::ostringstream out, err;
    EXPECT_EQ(cmd_run(cfg, out, err), 2);
    EXPECT_NE(err.str().find("integration failed"), std::string::npos);
    const CsvTable t = read_csv_file((fs::path(cfg.output_dir) / "trajectory.csv").string());
    EXPECT_GE(t.rows.size(), 1u);
}

TEST(CmdCompare, IdenticalRunsGiveIdenticalColumns) {
    const ExperimentConfig cfg = short_config("exp1_ihd", 10.0);
    CompareConfig cc{"twins", {{"a", cfg}, {"b", cfg}}};
    const fs::path dir = scratch("twins");
    std::ostringstream out, err;
    ASSERT_EQ(cmd_compare(cc, dir.string(), false, out, err), 0) << err.str();
    const CsvTable t = read_csv_file((dir / "compare.csv").string());
    for (const char* m : {"gap_", "feas_", "err_"}) {
        const std::size_t ca = t.column(std::string(m) + "a"), cb = t.column(std::string(m) + "b");
        for (const auto& row : t.rows) EXPECT_EQ(row[ca], row[cb]);
    }
    // label,oscillations,... : everything after the label must agree
    std::istringstream osc(slurp(dir / "oscillations.csv"));
    std::string header, line_a, line_b;
    std::getline(osc, header);
    std::getline(osc, line_a);
    std::getline(osc, line_b);
    EXPECT_EQ(line_a.substr(line_a.find(',')), line_b.substr(line_b.find(',')));
}

TEST(CmdCompare, ShiftTermSuppressesOscillations) {
    const CompareConfig cc = parse_compare(find_builtin("exp2_compare")->document);
    long with_shift = -1, without_shift = -1;
    for (const CompareRun& run : cc.runs) {
        if (run.label == "ihdtr") with_shift = run_experiment(run.config).oscillations;
        if (run.label == "ihdtr_no_shift") without_shift = run_experiment(run.config).oscillations;
    }
    ASSERT_GE(with_shift, 0);
    EXPECT_LT(with_shift, without_shift);
}

TEST(CmdCompare, UnshiftedPairIsWorstInSweep) {
    const CompareConfig cc = parse_compare(find_builtin("exp3_sweep")->document);
    double worst = -1.0, unshifted = -1.0;
    for (const CompareRun& run : cc.runs) {
        const RunResult r = run_experiment(run.config);
        ASSERT_TRUE(r.failure.empty()) << run.label << ": " << r.failure;
        const double e = r.final_record().iterate_error;
        if (run.label == "gamma=0,beta=0") {
            unshifted = e;
        } else {
            worst = std::max(worst, e);
        }
    }
    EXPECT_GT(unshifted, worst);
}

TEST(CmdCheck, PrintsSummaryLine) {
    CoefficientSchedule s;
    s.eps = TikhonovFamily::inverse_power(1.0, 1.5);
    std::ostringstream out;
    EXPECT_EQ(cmd_check(s, false, out), 0);
    EXPECT_NE(out.str().find("strong convergence: SATISFIED; rate estimates: NOT SATISFIED"), std::string::npos)
        << out.str();

    std::ostringstream js;
    cmd_check(s, true, js);
    const auto j = nlohmann::json::parse(js.str());
    EXPECT_TRUE(j.at("strong_convergence_ok").get<bool>());
    EXPECT_FALSE(j.at("rate_estimates_ok").get<bool>());
}

TEST(CmdRates, SyntheticInverseSquare) {
    const fs::path dir = scratch("rates");
    {
        std::ofstream os(dir / "synthetic.csv");
        os << "t,value\n";
        for (int k = 1; k <= 100; ++k) os << format_double(k) << ',' << format_double(7.0 / (k * k)) << '\n';
    }
    std::ostringstream out, err;
    ASSERT_EQ(cmd_rates((dir / "synthetic.csv").string(), {1.0, 100.0}, {}, out, err), 0) << err.str();
    EXPECT_NE(out.str().find("value: slope -2.00"), std::string::npos) << out.str();

    std::ostringstream out2, err2;
    EXPECT_EQ(cmd_rates((dir / "synthetic.csv").string(), {1.0, 100.0}, {"missing"}, out2, err2), 1);
}

TEST(CmdTikhonov, ToyPathIsZero) {
    const fs::path dir = scratch("tikhonov");
    std::ostringstream out, err;
    ASSERT_EQ(cmd_tikhonov(make_toy_problem(5, 10, 6, 1.0), {1, 0.1, 0.01}, dir.string(), out, err), 0) << err.str();
    const CsvTable t = read_csv_file((dir / "tikhonov_path.csv").string());
    ASSERT_EQ(t.rows.size(), 3u);
    for (const auto& row : t.rows) EXPECT_EQ(row[t.column("norm")], 0.0);
}

TEST(Labels, Sanitized) {
    EXPECT_EQ(sanitize_label("gamma=1,beta=-0.5"), "gamma_1_beta_-0.5");
    EXPECT_EQ(sanitize_label("IHD no shift"), "ihd_no_shift");
}

TEST(Svg, LogAxesSkipNonPositiveValues) {
    const std::string svg = render_line_chart({"demo", "t", "y", true, true}, {{"s", {1, 10, 100}, {1, 0, 0.01}}});
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_EQ(svg.find("nan"), std::string::npos);
    EXPECT_EQ(svg.find("inf"), std::string::npos);
}

TEST(Cli, ListsExperiments) { EXPECT_EQ(run_cli("--list-experiments"), 0); }

TEST(Cli, RejectsBadArguments) {
    EXPECT_NE(run_cli("run --experiment no_such_experiment"), 0);
    EXPECT_NE(run_cli("run --experiment exp1_ihd --system pd-avd"), 0);
    EXPECT_NE(run_cli("rates --window 1"), 0);
    EXPECT_NE(run_cli("check --alpha"), 0);
}

TEST(Cli, EnvironmentOverridesOutputDirectory) {
    const fs::path dir = scratch("env");
    EXPECT_EQ(run_cli("run --experiment exp1_ihd --horizon 5 --no-svg --out /nonexistent/ignored",
                      "PD_FLOW_OUT=" + dir.string()),
              0);
    EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
}

TEST(Cli, CheckAndTikhonovSubcommands) {
    EXPECT_EQ(run_cli("check -p 0 -r 1.5"), 0);
    EXPECT_EQ(run_cli("check -p 0 -r 2.5 --numeric --json"), 0);
    const fs::path dir = scratch("cli_tikhonov");
    EXPECT_EQ(run_cli("tikhonov --toy 5 10 6 --out " + dir.string()), 0);
    EXPECT_TRUE(fs::exists(dir / "tikhonov_path.csv"));
}
