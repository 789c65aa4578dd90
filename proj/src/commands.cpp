#include "pdflow/commands.hpp"

#include "pdflow/csv.hpp"
#include "pdflow/svg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pdflow {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string sci(double v) { return fmt("%.4e", v); }

double json_number(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN(); }

json fit_json(const std::optional<RateFit>& f) {
    if (!f) return nullptr;
    return {{"slope", f->slope},
            {"intercept", f->intercept},
            {"r_squared", f->r_squared},
            {"window", {f->window.first, f->window.second}},
            {"used", f->used},
            {"dropped", f->dropped},
            {"unreliable", f->unreliable}};
}

RateSummary summarize_rate(const std::string& name, const MetricSeries& series, std::pair<double, double> window,
                           double t2, const std::function<double(double)>& scale) {
    RateSummary rs;
    rs.metric = name;
    try {
        rs.fit = rate_fit(series, window);
    } catch (const std::invalid_argument&) {
        rs.fit.reset();
    }
    const double lo = std::max(t2, window.first), hi = window.second;
    if (lo < hi) {
        const double mid = 0.5 * (lo + hi);
        try {
            const double early = scaled_sup(series, scale, {lo, mid});
            const double late = scaled_sup(series, scale, {mid, hi});
            rs.growth = early > 0.0 ? late / early : (late > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        } catch (const std::invalid_argument&) {
            rs.growth = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return rs;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory '" + dir + "': " + ec.message());
}

std::vector<double> column_of(const std::vector<DiagnosticsRecord>& recs, double DiagnosticsRecord::*f) {
    std::vector<double> v;
    v.reserve(recs.size());
    for (const auto& r : recs) v.push_back(r.*f);
    return v;
}

void write_run_files(const RunResult& r, const std::string& dir, bool svg) {
    ensure_dir(dir);
    const Eigen::Index n = r.saddle.x.size(), m = r.saddle.lambda.size();
    {
        std::ofstream csv(fs::path(dir) / "trajectory.csv");
        if (!csv) throw std::runtime_error("cannot write trajectory CSV in '" + dir + "'");
        write_trajectory_csv(csv, r.trajectory, r.records, n, m);
    }
    write_text_file((fs::path(dir) / "summary.json").string(), summary_json(r).dump(2) + "\n");
    if (!svg || r.records.empty()) return;

    const std::vector<double> t = column_of(r.records, &DiagnosticsRecord::t);
    PlotSpec metrics{r.config.name + ": metrics", "t", "value", true, true};
    write_text_file((fs::path(dir) / "metrics.svg").string(),
                    render_line_chart(metrics, {{"gap at x_hat", t, column_of(r.records, &DiagnosticsRecord::gap_at_xhat)},
                                                {"feasibility", t, column_of(r.records, &DiagnosticsRecord::feasibility_at_xhat)},
                                                {"iterate error", t, column_of(r.records, &DiagnosticsRecord::iterate_error)},
                                                {"velocity", t, column_of(r.records, &DiagnosticsRecord::velocity_norm)}}));
    std::vector<PlotSeries> comps;
    for (Eigen::Index i = 0; i < n; ++i) {
        PlotSeries s{"x_" + std::to_string(i), t, {}};
        for (const auto& smp : r.trajectory.samples) s.y.push_back(smp.z[i]);
        comps.push_back(std::move(s));
    }
    PlotSpec traj{r.config.name + ": primal trajectory", "t", "x_i(t)", false, false};
    write_text_file((fs::path(dir) / "trajectory.svg").string(), render_line_chart(traj, comps));
}

void print_summary(const RunResult& r, std::ostream& out) {
    const DiagnosticsRecord& f = r.final_record();
    out << "run " << r.config.name << " (" << to_string(r.config.system) << ") on [" << r.config.initial.t0 << ", "
        << f.t << "]\n";
    out << "  steps accepted " << r.trajectory.step_stats.accepted << ", rejected " << r.trajectory.step_stats.rejected
        << ", " << fmt("%.2f", r.seconds) << " s\n";
    out << "  final ||x|| " << sci(r.final_x_norm()) << ", iterate error " << sci(f.iterate_error) << ", feasibility "
        << sci(f.feasibility_at_xhat) << ", gap " << sci(f.gap_at_xhat) << ", velocity " << sci(f.velocity_norm) << "\n";
    if (r.descent) {
        out << "  descent: t2 " << r.descent->t2_detected << ", violations after t2 " << r.descent->violations
            << ", before t2 " << r.descent->violations_before_t2 << ", max excess " << sci(r.descent->max_violation)
            << "\n";
    }
    for (const RateSummary& rs : r.rates) {
        out << "  rate " << rs.metric << ": ";
        if (rs.fit) {
            out << "slope " << fmt("%.3f", rs.fit->slope) << " on [" << rs.fit->window.first << ", "
                << rs.fit->window.second << "]" << (rs.fit->unreliable ? " (unreliable)" : "");
        } else {
            out << "too few points";
        }
        out << ", scaled growth " << fmt("%.3g", rs.growth) << "\n";
    }
    out << "  oscillations (feasibility maxima) " << r.oscillations << ", ball crossings " << r.ball_crossings << "\n";
}

}  // namespace

double RunResult::final_x_norm() const {
    if (trajectory.samples.empty()) return std::numeric_limits<double>::quiet_NaN();
    return trajectory.back().z.head(saddle.x.size()).norm();
}

std::string sanitize_label(const std::string& label) {
    std::string s;
    for (char c : label) {
        const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        const bool keep = (l >= 'a' && l <= 'z') || (l >= '0' && l <= '9') || l == '_' || l == '.' || l == '-';
        s += keep ? l : '_';
    }
    return s.empty() ? std::string("run") : s;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    RunResult r;
    r.config = cfg;
    const Problem problem = cfg.build_problem();
    r.saddle = resolve_saddle(problem);

    PrimalDualField field(problem, cfg.schedule, cfg.system);
    OdeRhs f = [&field](double t, const Vector& z, Vector& dz) { field(t, z, dz); };
    try {
        r.trajectory = integrate(f, cfg.initial.t0, cfg.initial.z.pack(), cfg.integrator);
    } catch (const IntegrationError& e) {
        r.failure = e.what();
        r.trajectory = e.partial();
    }

    const DiagnosticsContext ctx(problem, cfg.schedule, cfg.system, r.saddle);
    r.records = ctx.evaluate(r.trajectory);
    if (r.records.size() >= 10) r.descent = descent_check(r.records, ctx);

    if (!r.records.empty()) {
        const CoefficientSchedule& s = ctx.energy_params().schedule;
        auto window = cfg.effective_rate_window();
        // a shortened horizon or a failed run ends before the configured window does
        window.second = std::min(window.second, r.records.back().t);
        const double t2 = r.descent ? r.descent->t2_detected : cfg.initial.t0;
        const auto t2xi = [&s](double t) { return t * t * s.xi.value(t); };
        const auto lin = [](double t) { return t; };
        r.rates.push_back(summarize_rate("gap_xhat", metric_series(r.records, &DiagnosticsRecord::gap_at_xhat), window, t2, t2xi));
        r.rates.push_back(summarize_rate("feas_xhat", metric_series(r.records, &DiagnosticsRecord::feasibility_at_xhat), window, t2, t2xi));
        r.rates.push_back(summarize_rate("vel_norm", metric_series(r.records, &DiagnosticsRecord::velocity_norm), window, t2, lin));
        r.oscillations = count_local_maxima(column_of(r.records, &DiagnosticsRecord::feasibility_at_xhat));
        r.ball_crossings = ball_crossings(r.trajectory, problem.n(), r.saddle.x.norm());
        r.integrals = integral_estimates(r.records, s);
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

json summary_json(const RunResult& r) {
    json j;
    j["name"] = r.config.name;
    j["system"] = std::string(to_string(r.config.system));
    j["completed"] = r.failure.empty();
    if (!r.failure.empty()) j["failure"] = r.failure;
    j["steps"] = {{"accepted", r.trajectory.step_stats.accepted}, {"rejected", r.trajectory.step_stats.rejected}};
    if (!r.records.empty()) {
        const DiagnosticsRecord& f = r.final_record();
        j["final"] = {{"t", f.t},
                      {"x_norm", r.final_x_norm()},
                      {"iterate_err", f.iterate_error},
                      {"feas_xhat", f.feasibility_at_xhat},
                      {"gap_xhat", f.gap_at_xhat},
                      {"vel_norm", f.velocity_norm},
                      {"E", f.energy_E},
                      {"E_eps", f.energy_E_eps}};
    }
    if (r.descent) {
        j["descent"] = {{"t2", r.descent->t2_detected},
                        {"violations", r.descent->violations},
                        {"violations_before_t2", r.descent->violations_before_t2},
                        {"max_violation", json_number(r.descent->max_violation)},
                        {"samples", r.descent->samples}};
    }
    json rates = json::object();
    for (const RateSummary& rs : r.rates) rates[rs.metric] = {{"fit", fit_json(rs.fit)}, {"scaled_growth", json_number(rs.growth)}};
    j["rates"] = rates;
    j["oscillations"] = r.oscillations;
    j["ball_crossings"] = r.ball_crossings;
    j["integrals"] = {{"gap", r.integrals.gap},
                      {"velocity", r.integrals.velocity},
                      {"feasibility", r.integrals.feasibility},
                      {"bounded", r.integrals.bounded}};
    return j;
}

json condition_report_json(const ConditionReport& r) {
    return {{"ihd_mode", r.ihd_mode},
            {"growth_ok", r.growth_ok},
            {"delta_max", r.delta_max},
            {"eps_decay_ok", r.eps_decay_ok},
            {"rate_estimates_ok", r.rate_estimates_ok},
            {"velocity_vanishes_ok", r.velocity_vanishes_ok},
            {"strong_convergence_ok", r.strong_convergence_ok},
            {"numeric", r.numeric},
            {"notes", r.notes}};
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    const RunResult r = run_experiment(cfg);
    write_run_files(r, cfg.output_dir, cfg.svg);
    if (!r.records.empty()) print_summary(r, out);
    out << "  wrote " << (fs::path(cfg.output_dir) / "trajectory.csv").string() << "\n";
    if (!r.failure.empty()) {
        err << "integration failed: " << r.failure << " (partial trajectory written)\n";
        return 2;
    }
    return 0;
}

int cmd_compare(const CompareConfig& cc, const std::string& out_dir, bool svg, std::ostream& out, std::ostream& err) {
    std::vector<RunResult> results;
    results.reserve(cc.runs.size());
    int status = 0;
    for (const CompareRun& run : cc.runs) {
        ExperimentConfig cfg = run.config;
        cfg.output_dir = (fs::path(out_dir) / sanitize_label(run.label)).string();
        cfg.svg = false;
        results.push_back(run_experiment(cfg));
        write_run_files(results.back(), cfg.output_dir, false);
        if (!results.back().failure.empty()) {
            err << "run " << run.label << ": integration failed: " << results.back().failure << "\n";
            status = 2;
        }
    }
    if (status != 0) return status;

    const std::size_t rows = results.front().records.size();
    for (const RunResult& r : results) {
        if (r.records.size() != rows) {
            err << "compare: runs produced different sample grids\n";
            return 2;
        }
    }

    ensure_dir(out_dir);
    {
        std::ofstream csv(fs::path(out_dir) / "compare.csv");
        if (!csv) throw std::runtime_error("cannot write compare.csv in '" + out_dir + "'");
        csv << "t";
        for (const CompareRun& run : cc.runs) {
            const std::string l = sanitize_label(run.label);
            csv << ",gap_" << l << ",feas_" << l << ",err_" << l;
        }
        csv << '\n';
        for (std::size_t i = 0; i < rows; ++i) {
            csv << format_double(results.front().records[i].t);
            for (const RunResult& r : results) {
                const DiagnosticsRecord& rec = r.records[i];
                csv << ',' << format_double(rec.gap_at_xhat) << ',' << format_double(rec.feasibility_at_xhat) << ','
                    << format_double(rec.iterate_error);
            }
            csv << '\n';
        }
    }
    {
        std::ofstream csv(fs::path(out_dir) / "oscillations.csv");
        csv << "label,oscillations,final_iterate_err,final_feas_xhat,final_gap_xhat\n";
        for (std::size_t k = 0; k < results.size(); ++k) {
            const DiagnosticsRecord& f = results[k].final_record();
            csv << sanitize_label(cc.runs[k].label) << ',' << results[k].oscillations << ','
                << format_double(f.iterate_error) << ',' << format_double(f.feasibility_at_xhat) << ','
                << format_double(f.gap_at_xhat) << '\n';
        }
    }
    if (svg) {
        struct Panel {
            const char* file;
            const char* title;
            double DiagnosticsRecord::*field;
        };
        const Panel panels[] = {{"gap.svg", "primal-dual gap at x_hat", &DiagnosticsRecord::gap_at_xhat},
                                {"feasibility.svg", "feasibility violation", &DiagnosticsRecord::feasibility_at_xhat},
                                {"iterate_error.svg", "iterate error", &DiagnosticsRecord::iterate_error}};
        for (const Panel& p : panels) {
            std::vector<PlotSeries> series;
            for (std::size_t k = 0; k < results.size(); ++k) {
                series.push_back({cc.runs[k].label, column_of(results[k].records, &DiagnosticsRecord::t),
                                  column_of(results[k].records, p.field)});
            }
            PlotSpec chart{cc.name + ": " + p.title, "t", p.title, true, true};
            write_text_file((fs::path(out_dir) / p.file).string(), render_line_chart(chart, series));
        }
    }

    out << "compare " << cc.name << " (" << results.size() << " runs)\n";
    for (std::size_t k = 0; k < results.size(); ++k) {
        const DiagnosticsRecord& f = results[k].final_record();
        char line[256];
        std::snprintf(line, sizeof line, "  %-22s oscillations %4ld  final err %.4e  feas %.4e  gap %.4e  (%.2f s)\n",
                      cc.runs[k].label.c_str(), results[k].oscillations, f.iterate_error, f.feasibility_at_xhat,
                      f.gap_at_xhat, results[k].seconds);
        out << line;
    }
    out << "  wrote " << (fs::path(out_dir) / "compare.csv").string() << "\n";
    return 0;
}

int cmd_check(const CoefficientSchedule& s, bool as_json, std::ostream& out) {
    const ConditionReport r = check_theorem_conditions(s);
    if (as_json) {
        out << condition_report_json(r).dump(2) << "\n";
    } else {
        out << render_text(r);
    }
    return 0;
}

int cmd_rates(const std::string& csv_path, std::pair<double, double> window, const std::vector<std::string>& columns,
              std::ostream& out, std::ostream& err) {
    CsvTable table;
    try {
        table = read_csv_file(csv_path);
    } catch (const std::exception& e) {
        err << "rates: " << e.what() << "\n";
        return 1;
    }
    std::size_t tcol = 0;
    try {
        tcol = table.column("t");
    } catch (const std::out_of_range& e) {
        err << "rates: " << e.what() << "\n";
        return 1;
    }
    std::vector<std::string> names = columns;
    if (names.empty()) {
        const std::vector<std::string> preferred{"gap_xhat", "feas_xhat", "iterate_err", "vel_norm"};
        for (const auto& p : preferred) {
            if (std::find(table.header.begin(), table.header.end(), p) != table.header.end()) names.push_back(p);
        }
        if (names.empty()) {
            for (const auto& h : table.header) {
                if (h != "t") names.push_back(h);
            }
        }
    }
    int status = 0;
    for (const std::string& name : names) {
        std::size_t c = 0;
        try {
            c = table.column(name);
        } catch (const std::out_of_range& e) {
            err << "rates: " << e.what() << "\n";
            status = 1;
            continue;
        }
        MetricSeries series;
        series.reserve(table.rows.size());
        for (const auto& row : table.rows) series.emplace_back(row[tcol], row[c]);
        try {
            const RateFit fit = rate_fit(series, window);
            char line[256];
            std::snprintf(line, sizeof line, "%s: slope %.2f (exact %.17g), r^2 %.4f, %ld points, %ld dropped%s\n",
                          name.c_str(), fit.slope, fit.slope, fit.r_squared, fit.used, fit.dropped,
                          fit.unreliable ? ", unreliable" : "");
            out << line;
        } catch (const std::invalid_argument& e) {
            err << "rates: " << name << ": " << e.what() << "\n";
            status = 1;
        }
    }
    return status;
}

int cmd_tikhonov(const Problem& p, const std::vector<double>& grid, const std::string& out_dir, std::ostream& out,
                 std::ostream& err) {
    std::vector<PathPoint> path;
    SaddlePoint saddle;
    try {
        saddle = resolve_saddle(p);
        path = path_scan(p, saddle.lambda, grid);
    } catch (const std::exception& e) {
        err << "tikhonov: " << e.what() << "\n";
        return 1;
    }
    ensure_dir(out_dir);
    const fs::path file = fs::path(out_dir) / "tikhonov_path.csv";
    {
        std::ofstream csv(file);
        if (!csv) throw std::runtime_error("cannot write '" + file.string() + "'");
        write_path_csv(csv, path, p.n());
    }
    out << "tikhonov path, ||x*|| = " << sci(saddle.x.norm()) << "\n";
    for (const PathPoint& pt : path) {
        char line[160];
        std::snprintf(line, sizeof line, "  eps %-10.3g ||x_eps|| %.6e  ||x_eps - x*|| %.3e  residual %.2e\n", pt.eps,
                      pt.norm, (pt.x_eps - saddle.x).norm(), pt.residual);
        out << line;
    }
    out << "  wrote " << file.string() << "\n";
    return 0;
}

}  // namespace pdflow
