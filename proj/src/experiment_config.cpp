#include "pdflow/experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pdflow {

using nlohmann::json;

namespace {

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

void require_object(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(ptr, "expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
        if (!keys.count(k)) throw ConfigError(child(ptr, k), "unknown key");
    }
}

double read_number(const json& j, const std::string& ptr) {
    if (!j.is_number()) throw ConfigError(ptr, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(ptr, "expected a finite number");
    return v;
}

double number_or(const json& obj, const std::string& ptr, const char* key, double fallback) {
    return obj.contains(key) ? read_number(obj.at(key), child(ptr, key)) : fallback;
}

double required_number(const json& obj, const std::string& ptr, const char* key) {
    if (!obj.contains(key)) throw ConfigError(child(ptr, key), "missing required number");
    return read_number(obj.at(key), child(ptr, key));
}

std::string required_string(const json& obj, const std::string& ptr, const char* key) {
    if (!obj.contains(key)) throw ConfigError(child(ptr, key), "missing required string");
    if (!obj.at(key).is_string()) throw ConfigError(child(ptr, key), "expected a string");
    return obj.at(key).get<std::string>();
}

Vector read_vector(const json& j, const std::string& ptr) {
    if (!j.is_array() || j.empty()) throw ConfigError(ptr, "expected a non-empty array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = read_number(j[i], child(ptr, i));
    return v;
}

Matrix read_matrix(const json& j, const std::string& ptr) {
    if (!j.is_array() || j.empty()) throw ConfigError(ptr, "expected a non-empty array of rows");
    Matrix M;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Vector row = read_vector(j[i], child(ptr, i));
        if (i == 0) M.resize(static_cast<Eigen::Index>(j.size()), row.size());
        if (row.size() != M.cols()) throw ConfigError(child(ptr, i), "row length differs from the first row");
        M.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return M;
}

const json& required(const json& obj, const std::string& ptr, const char* key) {
    if (!obj.contains(key)) throw ConfigError(child(ptr, key), "missing required field");
    return obj.at(key);
}

ProblemSpec parse_problem(const json& j, const std::string& ptr) {
    if (!j.is_object()) throw ConfigError(ptr, "expected an object");
    ProblemSpec p;
    p.type = required_string(j, ptr, "type");
    if (p.type == "toy") {
        require_object(j, ptr, {"type", "m", "n", "e"});
        p.m = required_number(j, ptr, "m");
        p.n = required_number(j, ptr, "n");
        p.e = required_number(j, ptr, "e");
    } else if (p.type == "quadratic") {
        require_object(j, ptr, {"type", "Q", "q", "A", "b"});
        p.Q = read_matrix(required(j, ptr, "Q"), child(ptr, "Q"));
        p.q = read_vector(required(j, ptr, "q"), child(ptr, "q"));
        p.A = read_matrix(required(j, ptr, "A"), child(ptr, "A"));
        p.b = read_vector(required(j, ptr, "b"), child(ptr, "b"));
    } else if (p.type == "rank_one_squared") {
        require_object(j, ptr, {"type", "c", "A", "b"});
        p.c = read_vector(required(j, ptr, "c"), child(ptr, "c"));
        p.A = read_matrix(required(j, ptr, "A"), child(ptr, "A"));
        p.b = read_vector(required(j, ptr, "b"), child(ptr, "b"));
    } else {
        throw ConfigError(child(ptr, "type"), "unknown problem type '" + p.type + "' (toy, quadratic, rank_one_squared)");
    }
    return p;
}

CoefficientSchedule parse_schedule(const json& j, const std::string& ptr) {
    require_object(j, ptr, {"alpha", "gamma", "beta", "xi", "eps"});
    CoefficientSchedule s;
    s.alpha = number_or(j, ptr, "alpha", s.alpha);
    s.gamma = number_or(j, ptr, "gamma", s.gamma);
    s.beta_shift = number_or(j, ptr, "beta", s.beta_shift);
    if (j.contains("xi")) {
        const std::string xp = child(ptr, "xi");
        require_object(j.at("xi"), xp, {"c", "p"});
        const double c = number_or(j.at("xi"), xp, "c", 1.0);
        const double pw = number_or(j.at("xi"), xp, "p", 0.0);
        try {
            s.xi = ScalingFamily::power_law(c, pw);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(xp, e.what());
        }
    }
    if (j.contains("eps")) {
        const std::string ep = child(ptr, "eps");
        const json& e = j.at("eps");
        if (!e.is_object()) throw ConfigError(ep, "expected an object");
        const std::string type = required_string(e, ep, "type");
        if (type == "zero") {
            require_object(e, ep, {"type"});
            s.eps = TikhonovFamily::zero();
        } else if (type == "inverse_power") {
            require_object(e, ep, {"type", "a", "r"});
            try {
                s.eps = TikhonovFamily::inverse_power(number_or(e, ep, "a", 1.0), required_number(e, ep, "r"));
            } catch (const ConfigError&) {
                throw;
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(ep, ex.what());
            }
        } else {
            throw ConfigError(child(ep, "type"), "unknown eps type '" + type + "' (zero, inverse_power)");
        }
    }
    return s;
}

IntegratorConfig parse_integrator(const json& j, const std::string& ptr) {
    require_object(j, ptr, {"method", "rtol", "atol", "h_init", "h_min", "h_max", "t_end", "sample_every", "fixed_step"});
    IntegratorConfig c;
    if (j.contains("method")) {
        try {
            c.method = method_from_string(required_string(j, ptr, "method"));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(child(ptr, "method"), e.what());
        }
    }
    c.rtol = number_or(j, ptr, "rtol", c.rtol);
    c.atol = number_or(j, ptr, "atol", c.atol);
    c.h_init = number_or(j, ptr, "h_init", c.h_init);
    c.h_min = number_or(j, ptr, "h_min", c.h_min);
    c.h_max = number_or(j, ptr, "h_max", c.h_max);
    c.t_end = number_or(j, ptr, "t_end", c.t_end);
    c.sample_every = number_or(j, ptr, "sample_every", c.sample_every);
    if (j.contains("fixed_step")) {
        if (!j.at("fixed_step").is_boolean()) throw ConfigError(child(ptr, "fixed_step"), "expected a boolean");
        c.fixed_step = j.at("fixed_step").get<bool>();
    }
    return c;
}

json vector_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json matrix_json(const Matrix& M) {
    json a = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) a.push_back(vector_json(M.row(i).transpose()));
    return a;
}

}  // namespace

Problem ExperimentConfig::build_problem() const {
    const ProblemSpec& p = problem;
    if (p.type == "toy") return make_toy_problem(p.m, p.n, p.e, rho);
    LinearConstraint constraint(p.A, p.b);
    if (p.type == "quadratic") return Problem(ConvexObjective::quadratic(p.Q, p.q), std::move(constraint), rho);
    return Problem(ConvexObjective::rank_one_squared(p.c), std::move(constraint), rho);
}

std::pair<double, double> ExperimentConfig::effective_rate_window() const {
    if (rate_window) return *rate_window;
    const double t0 = initial.t0, t1 = integrator.t_end;
    if (t1 > 20.0 && t0 < 10.0) return {10.0, t1};
    return {0.5 * (t0 + t1), t1};
}

ExperimentConfig parse_experiment(const json& j) {
    require_object(j, "", {"name", "problem", "rho", "system", "schedule", "initial", "integrator", "output", "rates"});
    ExperimentConfig cfg;
    if (j.contains("name")) cfg.name = required_string(j, "", "name");
    cfg.problem = parse_problem(required(j, "", "problem"), "/problem");
    cfg.rho = number_or(j, "", "rho", cfg.rho);
    if (j.contains("system")) {
        try {
            cfg.system = system_from_string(required_string(j, "", "system"));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError("/system", e.what());
        }
    }
    if (j.contains("schedule")) cfg.schedule = parse_schedule(j.at("schedule"), "/schedule");
    if (j.contains("integrator")) cfg.integrator = parse_integrator(j.at("integrator"), "/integrator");

    Problem problem = [&] {
        try {
            return cfg.build_problem();
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError("/problem", e.what());
        }
    }();
    if (!(cfg.rho >= 0.0)) throw ConfigError("/rho", "rho must be nonnegative");

    const json& init = required(j, "", "initial");
    require_object(init, "/initial", {"t0", "x", "lambda", "vx", "vlambda"});
    cfg.initial.t0 = number_or(init, "/initial", "t0", 1.0);
    if (!(cfg.initial.t0 > 0.0)) throw ConfigError("/initial/t0", "t0 must be positive");
    cfg.schedule.t0 = cfg.initial.t0;
    const Eigen::Index n = problem.n(), m = problem.m();
    auto read_state = [&](const char* key, Eigen::Index size, bool optional) -> Vector {
        const std::string ptr = child("/initial", key);
        if (!init.contains(key)) {
            if (optional) return Vector::Zero(size);
            throw ConfigError(ptr, "missing required array");
        }
        Vector v = read_vector(init.at(key), ptr);
        if (v.size() != size) {
            throw ConfigError(ptr, "expected length " + std::to_string(size) + ", got " + std::to_string(v.size()));
        }
        return v;
    };
    cfg.initial.z.x = read_state("x", n, false);
    cfg.initial.z.lambda = read_state("lambda", m, false);
    cfg.initial.z.vx = read_state("vx", n, true);
    cfg.initial.z.vlambda = read_state("vlambda", m, true);

    try {
        cfg.schedule.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("/schedule", e.what());
    }
    try {
        cfg.integrator.validate(cfg.initial.t0);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("/integrator", e.what());
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        require_object(o, "/output", {"dir", "svg"});
        if (o.contains("dir")) cfg.output_dir = required_string(o, "/output", "dir");
        if (o.contains("svg")) {
            if (!o.at("svg").is_boolean()) throw ConfigError("/output/svg", "expected a boolean");
            cfg.svg = o.at("svg").get<bool>();
        }
    }
    if (j.contains("rates")) {
        const json& r = j.at("rates");
        require_object(r, "/rates", {"window"});
        if (r.contains("window")) {
            const Vector w = read_vector(r.at("window"), "/rates/window");
            if (w.size() != 2 || !(w[0] < w[1])) throw ConfigError("/rates/window", "expected [t_lo, t_hi] with t_lo < t_hi");
            cfg.rate_window = std::make_pair(w[0], w[1]);
        }
    }
    return cfg;
}

bool is_compare_document(const json& j) { return j.is_object() && j.contains("runs"); }

CompareConfig parse_compare(const json& j) {
    require_object(j, "", {"name", "base", "runs"});
    CompareConfig cc;
    if (j.contains("name")) cc.name = required_string(j, "", "name");
    const json& base = required(j, "", "base");
    if (!base.is_object()) throw ConfigError("/base", "expected an object");
    const json& runs = required(j, "", "runs");
    if (!runs.is_array() || runs.empty()) throw ConfigError("/runs", "expected a non-empty array");
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const std::string ptr = child("/runs", i);
        require_object(runs[i], ptr, {"label", "patch"});
        CompareRun run;
        run.label = required_string(runs[i], ptr, "label");
        json merged = base;
        if (runs[i].contains("patch")) merged.merge_patch(runs[i].at("patch"));
        try {
            run.config = parse_experiment(merged);
        } catch (const ConfigError& e) {
            throw ConfigError(ptr + "/patch" + e.pointer(), e.message());
        }
        if (run.config.name.empty()) run.config.name = run.label;
        cc.runs.push_back(std::move(run));
    }
    const ExperimentConfig& first = cc.runs.front().config;
    for (std::size_t i = 1; i < cc.runs.size(); ++i) {
        const ExperimentConfig& c = cc.runs[i].config;
        if (c.initial.t0 != first.initial.t0 || c.integrator.t_end != first.integrator.t_end ||
            c.integrator.sample_every != first.integrator.sample_every) {
            throw ConfigError(child("/runs", i), "horizon or sampling differs from the first run");
        }
    }
    return cc;
}

json to_json(const ExperimentConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    const ProblemSpec& p = cfg.problem;
    if (p.type == "toy") {
        j["problem"] = {{"type", "toy"}, {"m", p.m}, {"n", p.n}, {"e", p.e}};
    } else if (p.type == "quadratic") {
        j["problem"] = {{"type", "quadratic"}, {"Q", matrix_json(p.Q)}, {"q", vector_json(p.q)},
                        {"A", matrix_json(p.A)}, {"b", vector_json(p.b)}};
    } else {
        j["problem"] = {{"type", "rank_one_squared"}, {"c", vector_json(p.c)}, {"A", matrix_json(p.A)},
                        {"b", vector_json(p.b)}};
    }
    j["rho"] = cfg.rho;
    j["system"] = std::string(to_string(cfg.system));
    const CoefficientSchedule& s = cfg.schedule;
    json sched = {{"alpha", s.alpha}, {"gamma", s.gamma}, {"beta", s.beta_shift}};
    if (const auto* pl = s.xi.as_power_law()) sched["xi"] = {{"c", pl->c}, {"p", pl->p}};
    if (const auto* ip = s.eps.as_inverse_power()) {
        sched["eps"] = {{"type", "inverse_power"}, {"a", ip->a}, {"r", ip->r}};
    } else {
        sched["eps"] = {{"type", "zero"}};
    }
    j["schedule"] = sched;
    j["initial"] = {{"t0", cfg.initial.t0},
                    {"x", vector_json(cfg.initial.z.x)},
                    {"lambda", vector_json(cfg.initial.z.lambda)},
                    {"vx", vector_json(cfg.initial.z.vx)},
                    {"vlambda", vector_json(cfg.initial.z.vlambda)}};
    const IntegratorConfig& ic = cfg.integrator;
    j["integrator"] = {{"method", std::string(to_string(ic.method))},
                       {"rtol", ic.rtol},
                       {"atol", ic.atol},
                       {"h_init", ic.h_init},
                       {"h_min", ic.h_min},
                       {"h_max", ic.h_max},
                       {"t_end", ic.t_end},
                       {"sample_every", ic.sample_every},
                       {"fixed_step", ic.fixed_step}};
    j["output"] = {{"dir", cfg.output_dir}, {"svg", cfg.svg}};
    if (cfg.rate_window) j["rates"] = {{"window", {cfg.rate_window->first, cfg.rate_window->second}}};
    return j;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config file '" + path + "': " + e.what());
    }
}

}  // namespace pdflow
