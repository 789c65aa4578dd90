// pdflow: simulate primal-dual flows, compare variants, check schedule
// hypotheses, fit convergence rates and compute Tikhonov paths.

#include "pdflow/commands.hpp"
#include "pdflow/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

using namespace pdflow;

namespace {

struct Overrides {
    std::string out;
    std::string system;
    std::optional<double> horizon, rtol, atol;
    std::optional<bool> svg;
};

nlohmann::json load_document(const std::string& config, const std::string& experiment) {
    if (!config.empty() && !experiment.empty()) throw CLI::ValidationError("use either --config or --experiment");
    if (!experiment.empty()) {
        const BuiltinExperiment* b = find_builtin(experiment);
        if (!b) throw CLI::ValidationError("unknown experiment '" + experiment + "' (see --list-experiments)");
        return b->document;
    }
    if (config.empty()) throw CLI::ValidationError("one of --config or --experiment is required");
    return load_json_file(config);
}

std::string resolve_out(const std::string& flag, const std::string& fallback) {
    if (const char* env = std::getenv("PD_FLOW_OUT"); env && *env) return env;
    return flag.empty() ? fallback : flag;
}

void apply(ExperimentConfig& cfg, const Overrides& o) {
    if (!o.system.empty()) cfg.system = system_from_string(o.system);
    if (o.horizon) cfg.integrator.t_end = *o.horizon;
    if (o.rtol) cfg.integrator.rtol = *o.rtol;
    if (o.atol) cfg.integrator.atol = *o.atol;
    if (o.svg) cfg.svg = *o.svg;
    cfg.integrator.validate(cfg.initial.t0);
}

void add_common(CLI::App* cmd, Overrides& o, std::string& config, std::string& experiment) {
    cmd->add_option("--config", config, "experiment JSON file")->check(CLI::ExistingFile);
    cmd->add_option("--experiment", experiment, "built-in experiment id");
    cmd->add_option("--out", o.out, "output directory (PD_FLOW_OUT overrides)");
    cmd->add_option("--horizon", o.horizon, "final time T")->check(CLI::PositiveNumber);
    cmd->add_option("--rtol", o.rtol, "relative tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--atol", o.atol, "absolute tolerance")->check(CLI::PositiveNumber);
    cmd->add_flag_callback("--svg", [&o] { o.svg = true; }, "write SVG plots");
    cmd->add_flag_callback("--no-svg", [&o] { o.svg = false; }, "skip SVG plots");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Primal-dual dynamics with implicit Hessian damping and Tikhonov regularization"};
    app.require_subcommand(0, 1);
    bool list = false;
    app.add_flag("--list-experiments", list, "list built-in experiments and exit");

    Overrides run_o;
    std::string run_config, run_experiment_id;
    CLI::App* run = app.add_subcommand("run", "simulate one configuration");
    add_common(run, run_o, run_config, run_experiment_id);
    run->add_option("--system", run_o.system, "override the system")->check(CLI::IsMember({"ihd", "ihdtr", "baseline"}));

    Overrides cmp_o;
    std::string cmp_config, cmp_experiment_id;
    CLI::App* compare = app.add_subcommand("compare", "run several configurations on a shared time grid");
    add_common(compare, cmp_o, cmp_config, cmp_experiment_id);

    CoefficientSchedule sched;
    double xi_c = 1.0, xi_p = 0.0, eps_a = 1.0;
    std::optional<double> eps_r;
    bool check_json = false, check_numeric = false;
    CLI::App* check = app.add_subcommand("check", "report which convergence hypotheses a schedule satisfies");
    check->add_option("--alpha", sched.alpha, "viscous damping parameter")->capture_default_str();
    check->add_option("--gamma", sched.gamma, "constant part of beta(t)")->capture_default_str();
    check->add_option("--beta", sched.beta_shift, "coefficient of 1/t in beta(t)")->capture_default_str();
    check->add_option("--xi-c", xi_c, "xi(t) = c t^p")->capture_default_str();
    check->add_option("-p,--xi-p", xi_p, "xi(t) = c t^p")->capture_default_str();
    check->add_option("--eps-a", eps_a, "eps(t) = a / t^r")->capture_default_str();
    check->add_option("-r,--eps-r", eps_r, "eps(t) = a / t^r; omit for no Tikhonov term");
    check->add_flag("--json", check_json, "machine-readable output");
    check->add_flag("--numeric", check_numeric, "decide by quadrature instead of exponents");

    std::string rates_csv;
    std::vector<double> rates_window;
    std::vector<std::string> rates_columns;
    CLI::App* rates = app.add_subcommand("rates", "fit log-log slopes to CSV columns");
    rates->add_option("--csv", rates_csv, "CSV with a t column")->required()->check(CLI::ExistingFile);
    rates->add_option("--window", rates_window, "t_lo t_hi")->expected(2)->required();
    rates->add_option("--column", rates_columns, "column to fit (repeatable)");

    Overrides tk_o;
    std::string tk_config, tk_experiment_id;
    std::vector<double> tk_grid{1.0, 0.1, 0.01, 1e-4};
    std::vector<double> tk_toy;
    double tk_rho = 1.0;
    CLI::App* tikhonov = app.add_subcommand("tikhonov", "compute the Tikhonov regularization path");
    tikhonov->add_option("--config", tk_config, "experiment JSON file supplying the problem")->check(CLI::ExistingFile);
    tikhonov->add_option("--experiment", tk_experiment_id, "built-in experiment supplying the problem");
    tikhonov->add_option("--toy", tk_toy, "toy problem coefficients m n e")->expected(3);
    tikhonov->add_option("--grid", tk_grid, "strictly decreasing eps values")->capture_default_str();
    tikhonov->add_option("--rho", tk_rho, "penalty parameter for --toy")->capture_default_str();
    tikhonov->add_option("--out", tk_o.out, "output directory (PD_FLOW_OUT overrides)");

    std::string show_id;
    CLI::App* show = app.add_subcommand("show", "print a built-in experiment document (a config template)");
    show->add_option("--experiment", show_id, "built-in experiment id")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (list) {
            for (const BuiltinExperiment& b : builtin_experiments()) {
                std::cout << b.id << (is_compare_document(b.document) ? "  [compare]  " : "  [run]      ")
                          << b.description << "\n";
            }
            return 0;
        }
        if (*run) {
            const nlohmann::json doc = load_document(run_config, run_experiment_id);
            if (is_compare_document(doc)) {
                std::cerr << "this is a comparison document; use 'pdflow compare'\n";
                return 1;
            }
            ExperimentConfig cfg = parse_experiment(doc);
            apply(cfg, run_o);
            cfg.output_dir = resolve_out(run_o.out, cfg.output_dir);
            return cmd_run(cfg, std::cout, std::cerr);
        }
        if (*compare) {
            const nlohmann::json doc = load_document(cmp_config, cmp_experiment_id);
            if (!is_compare_document(doc)) {
                std::cerr << "compare needs a document with \"base\" and \"runs\"\n";
                return 1;
            }
            CompareConfig cc = parse_compare(doc);
            for (CompareRun& r : cc.runs) apply(r.config, cmp_o);
            const std::string fallback = "out/" + (cc.name.empty() ? std::string("compare") : cc.name);
            const bool svg = cmp_o.svg.value_or(true);
            return cmd_compare(cc, resolve_out(cmp_o.out, fallback), svg, std::cout, std::cerr);
        }
        if (*check) {
            sched.xi = ScalingFamily::power_law(xi_c, xi_p);
            sched.eps = eps_r ? TikhonovFamily::inverse_power(eps_a, *eps_r) : TikhonovFamily::zero();
            sched.validate();
            if (check_numeric) {
                const ConditionReport r = check_theorem_conditions_numeric(sched);
                std::cout << (check_json ? condition_report_json(r).dump(2) + "\n" : render_text(r));
                return 0;
            }
            return cmd_check(sched, check_json, std::cout);
        }
        if (*rates) {
            return cmd_rates(rates_csv, {rates_window[0], rates_window[1]}, rates_columns, std::cout, std::cerr);
        }
        if (*tikhonov) {
            std::optional<Problem> problem;
            if (!tk_toy.empty()) {
                problem = make_toy_problem(tk_toy[0], tk_toy[1], tk_toy[2], tk_rho);
            } else {
                problem = parse_experiment(load_document(tk_config, tk_experiment_id)).build_problem();
            }
            return cmd_tikhonov(*problem, tk_grid, resolve_out(tk_o.out, "out/tikhonov"), std::cout, std::cerr);
        }
        if (*show) {
            std::cout << load_document("", show_id).dump(2) << "\n";
            return 0;
        }
        std::cout << app.help();
        return 1;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error at " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
