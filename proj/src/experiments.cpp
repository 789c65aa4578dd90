#include "pdflow/experiments.hpp"

#include <cstdio>

namespace pdflow {

using nlohmann::json;

namespace {

json toy(double m, double n, double e) { return {{"type", "toy"}, {"m", m}, {"n", n}, {"e", e}}; }

json schedule(double gamma, double beta, const json& eps) {
    return {{"alpha", 3.1}, {"gamma", gamma}, {"beta", beta}, {"xi", {{"c", 1.0}, {"p", 0.0}}}, {"eps", eps}};
}

json inverse_power(double r) { return {{"type", "inverse_power"}, {"a", 1.0}, {"r", r}}; }

json integrator(double t_end, double rtol, double sample_every) {
    return {{"method", "bs23"},  {"rtol", rtol},     {"atol", rtol * 1e-3},        {"h_init", 1e-3},
            {"h_min", 1e-14},    {"h_max", 0.1},     {"t_end", t_end},             {"sample_every", sample_every}};
}

json single_start(double vlambda) {
    return {{"t0", 1.0},
            {"x", {1.0, -1.0, -1.0}},
            {"lambda", {1.0}},
            {"vx", {-1.0, 1.0, 1.0}},
            {"vlambda", {vlambda}}};
}

json ones_start() {
    return {{"t0", 1.0}, {"x", {1.0, 1.0, 1.0}}, {"lambda", {1.0}}, {"vx", {1.0, 1.0, 1.0}}, {"vlambda", {1.0}}};
}

json experiment(const std::string& name, const std::string& system, const json& sched, const json& init,
                const json& integ) {
    return {{"name", name},
            {"problem", toy(5, 10, 6)},
            {"rho", 1.0},
            {"system", system},
            {"schedule", sched},
            {"initial", init},
            {"integrator", integ},
            {"output", {{"dir", "out/" + name}, {"svg", true}}}};
}

json run(const std::string& label, const json& patch) { return {{"label", label}, {"patch", patch}}; }

std::vector<BuiltinExperiment> make_builtins() {
    std::vector<BuiltinExperiment> out;
    const json exp1_sched = schedule(1.0, -0.5, inverse_power(1.5));

    out.push_back({"exp1_ihdtr", "toy (5, 10, 6), Tikhonov flow from the single start; x(t) -> minimum-norm solution",
                   experiment("exp1_ihdtr", "ihdtr", exp1_sched, single_start(-1.0), integrator(50, 1e-6, 0.05))});
    out.push_back({"exp1_ihd", "same start without the Tikhonov term; x(t) settles away from the minimum-norm solution",
                   experiment("exp1_ihd", "ihd", exp1_sched, single_start(-1.0), integrator(50, 1e-6, 0.05))});
    out.push_back({"exp1_baseline", "same start with gamma = beta = 0 and no Tikhonov term",
                   experiment("exp1_baseline", "baseline", exp1_sched, single_start(-1.0), integrator(50, 1e-6, 0.05))});

    {
        json base = experiment("exp2_compare", "ihdtr", exp1_sched, ones_start(), integrator(50, 1e-6, 0.05));
        json runs = json::array();
        runs.push_back(run("ihdtr", {{"system", "ihdtr"}}));
        runs.push_back(run("ihdtr_no_shift", {{"system", "ihdtr"}, {"schedule", {{"gamma", 0.0}, {"beta", 0.0}}}}));
        runs.push_back(run("ihd", {{"system", "ihd"}}));
        runs.push_back(run("ihd_no_shift", {{"system", "ihd"}, {"schedule", {{"gamma", 0.0}, {"beta", 0.0}}}}));
        runs.push_back(run("baseline", {{"system", "baseline"}}));
        out.push_back({"exp2_compare", "five flows from the all-ones start; the shift term removes oscillations",
                       {{"name", "exp2_compare"}, {"base", base}, {"runs", runs}}});
    }
    {
        json base = experiment("exp3_sweep", "ihdtr", schedule(1.0, -0.5, inverse_power(1.1)), single_start(1.0),
                               integrator(50, 1e-6, 0.05));
        base["problem"] = toy(0.1, 20, 50);
        json runs = json::array();
        const double pairs[][2] = {{1.0, -0.5}, {0.5, -0.25}, {0.0, 0.5}, {0.0, 1.0}, {0.0, 0.0}};
        for (const auto& pr : pairs) {
            char label[64];
            std::snprintf(label, sizeof label, "gamma=%g,beta=%g", pr[0], pr[1]);
            runs.push_back(run(label, {{"schedule", {{"gamma", pr[0]}, {"beta", pr[1]}}}}));
        }
        out.push_back({"exp3_sweep", "toy (0.1, 20, 50), Tikhonov flow for several (gamma, beta) pairs",
                       {{"name", "exp3_sweep"}, {"base", base}, {"runs", runs}}});
    }

    json rates = experiment("rates_ihd_200", "ihd", exp1_sched, single_start(-1.0), integrator(200, 1e-8, 0.1));
    rates["rates"] = {{"window", {10.0, 200.0}}};
    out.push_back({"rates_ihd_200", "single start without Tikhonov term on [1, 200] at rtol 1e-8 for rate fits", rates});

    json vel = experiment("velocity_ihdtr_200", "ihdtr", exp1_sched, single_start(-1.0), integrator(200, 1e-8, 0.1));
    vel["rates"] = {{"window", {10.0, 200.0}}};
    out.push_back({"velocity_ihdtr_200", "Tikhonov flow on [1, 200] at rtol 1e-8; velocity vanishes", vel});
    return out;
}

}  // namespace

const std::vector<BuiltinExperiment>& builtin_experiments() {
    static const std::vector<BuiltinExperiment> all = make_builtins();
    return all;
}

const BuiltinExperiment* find_builtin(const std::string& id) {
    for (const BuiltinExperiment& b : builtin_experiments()) {
        if (b.id == id) return &b;
    }
    return nullptr;
}

}  // namespace pdflow
