#include "pdflow/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace pdflow {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::AdaptiveBS23: return "bs23";
        case Method::FixedRK4: return "rk4";
    }
    return "unknown";
}

Method method_from_string(std::string_view name) {
    if (name == "bs23" || name == "ode23") return Method::AdaptiveBS23;
    if (name == "rk4") return Method::FixedRK4;
    throw std::invalid_argument("unknown integration method '" + std::string(name) + "' (expected bs23 or rk4)");
}

void IntegratorConfig::validate(double t0) const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("integrator config: " + msg); };
    if (!(rtol > 0.0) || !(atol > 0.0)) fail("rtol and atol must be positive");
    if (!(h_min > 0.0) || !(h_min <= h_init) || !(h_init <= h_max)) fail("need 0 < h_min <= h_init <= h_max");
    if (!(t_end > t0)) fail("t_end must exceed t0");
    if (!(sample_every > 0.0)) fail("sample_every must be positive");
}

namespace {

// Bogacki-Shampine 3(2): c = (0, 1/2, 3/4, 1), third-order weights
// (2/9, 1/3, 4/9, 0), embedded second-order weights (7/24, 1/4, 1/3, 1/8).
constexpr double kA21 = 1.0 / 2.0;
constexpr double kA32 = 3.0 / 4.0;
constexpr double kB1 = 2.0 / 9.0, kB2 = 1.0 / 3.0, kB3 = 4.0 / 9.0;
constexpr double kE1 = kB1 - 7.0 / 24.0;
constexpr double kE2 = kB2 - 1.0 / 4.0;
constexpr double kE3 = kB3 - 1.0 / 3.0;
constexpr double kE4 = -1.0 / 8.0;

constexpr double kSafety = 0.9;
constexpr double kMaxGrowth = 5.0;
constexpr double kMaxShrink = 0.1;

class Sampler {
public:
    Sampler(double t0, double t_end, double every, Trajectory& out) : t0_(t0), t_end_(t_end), every_(every), out_(out) {
        // Grid points this close to t_end are replaced by t_end itself.
        guard_ = 1e-9 * std::max(every_, 1e-300);
    }

    void start(const Vector& z0) { out_.samples.push_back({t0_, z0}); }

    // Emits every grid point in (t, t + h] by cubic Hermite interpolation.
    void step(double t, double h, const Vector& z0, const Vector& f0, const Vector& z1, const Vector& f1) {
        const double t1 = t + h;
        for (;;) {
            const double ts = t0_ + static_cast<double>(next_) * every_;
            if (ts > t1 || ts >= t_end_ - guard_) break;
            const double th = (ts - t) / h;
            const double th2 = th * th, th3 = th2 * th;
            const double h00 = 2 * th3 - 3 * th2 + 1, h10 = th3 - 2 * th2 + th;
            const double h01 = -2 * th3 + 3 * th2, h11 = th3 - th2;
            out_.samples.push_back({ts, h00 * z0 + (h10 * h) * f0 + h01 * z1 + (h11 * h) * f1});
            ++next_;
        }
    }

    void finish(const Vector& z_end) { out_.samples.push_back({t_end_, z_end}); }

private:
    double t0_, t_end_, every_, guard_;
    long next_ = 1;
    Trajectory& out_;
};

void record_step(StepStats& s, double h) {
    ++s.accepted;
    s.min_h = std::min(s.min_h, h);
    s.max_h = std::max(s.max_h, h);
}

// Evaluates rhs, mapping non-finite output or a NonFiniteError to `false`.
bool try_eval(OdeRhs& rhs, double t, const Vector& z, Vector& out) {
    try {
        rhs(t, z, out);
    } catch (const NonFiniteError&) {
        return false;
    }
    return out.allFinite();
}

Trajectory integrate_bs23(OdeRhs& rhs, double t0, const Vector& z0, const IntegratorConfig& cfg) {
    Trajectory traj;
    Sampler sampler(t0, cfg.t_end, cfg.sample_every, traj);
    const Eigen::Index d = z0.size();
    Vector z = z0, z_new(d), stage(d), k1(d), k2(d), k3(d), k4(d);

    if (!try_eval(rhs, t0, z, k1)) throw IntegrationError("non-finite right-hand side at t0", traj, t0, z);
    sampler.start(z);

    const double span = cfg.t_end - t0;
    double t = t0;
    double h = cfg.fixed_step ? span / std::max(1.0, std::round(span / cfg.h_init)) : cfg.h_init;
    const long fixed_steps = cfg.fixed_step ? std::lround(span / h) : 0;

    while (t < cfg.t_end) {
        bool last = false;
        if (cfg.fixed_step) {
            last = traj.step_stats.accepted + 1 == fixed_steps;
        } else if (t + h >= cfg.t_end) {
            h = cfg.t_end - t;
            last = true;
        }
        const double t_new = last ? cfg.t_end
                                  : (cfg.fixed_step ? t0 + static_cast<double>(traj.step_stats.accepted + 1) * h : t + h);
        const double h_eff = t_new - t;

        bool finite = true;
        stage = z + (h_eff * kA21) * k1;
        finite = finite && try_eval(rhs, t + 0.5 * h_eff, stage, k2);
        if (finite) {
            stage = z + (h_eff * kA32) * k2;
            finite = try_eval(rhs, t + 0.75 * h_eff, stage, k3);
        }
        if (finite) {
            z_new = z + h_eff * (kB1 * k1 + kB2 * k2 + kB3 * k3);
            finite = try_eval(rhs, t_new, z_new, k4);
        }

        double err = std::numeric_limits<double>::infinity();
        if (finite) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < d; ++i) {
                const double e = h_eff * (kE1 * k1[i] + kE2 * k2[i] + kE3 * k3[i] + kE4 * k4[i]);
                const double sc = cfg.atol + cfg.rtol * std::max(std::abs(z[i]), std::abs(z_new[i]));
                acc += (e / sc) * (e / sc);
            }
            err = std::sqrt(acc / static_cast<double>(d));
        }

        if (cfg.fixed_step) {
            if (!finite) throw IntegrationError("non-finite right-hand side", traj, t, z);
        } else if (!(err <= 1.0)) {
            ++traj.step_stats.rejected;
            // h_eff = t_new - t can round to just above h_min near large t
            if (h <= cfg.h_min || h_eff <= cfg.h_min) {
                std::ostringstream os;
                os << "step size underflow at t = " << t << " (h = " << h_eff << ", error ratio " << err << ")";
                throw IntegrationError(os.str(), traj, t, z);
            }
            const double factor = std::isfinite(err) ? std::max(kMaxShrink, kSafety * std::pow(err, -1.0 / 3.0)) : kMaxShrink;
            h = std::clamp(h_eff * factor, cfg.h_min, cfg.h_max);
            continue;
        }

        sampler.step(t, h_eff, z, k1, z_new, k4);
        record_step(traj.step_stats, h_eff);
        t = t_new;
        z.swap(z_new);
        k1.swap(k4);

        if (!cfg.fixed_step && !last) {
            const double factor = err == 0.0 ? kMaxGrowth
                                             : std::clamp(kSafety * std::pow(err, -1.0 / 3.0), kMaxShrink, kMaxGrowth);
            h = std::clamp(h_eff * factor, cfg.h_min, cfg.h_max);
        }
    }
    sampler.finish(z);
    return traj;
}

Trajectory integrate_rk4(OdeRhs& rhs, double t0, const Vector& z0, const IntegratorConfig& cfg) {
    Trajectory traj;
    Sampler sampler(t0, cfg.t_end, cfg.sample_every, traj);
    const Eigen::Index d = z0.size();
    Vector z = z0, z_new(d), stage(d), k1(d), k2(d), k3(d), k4(d), f_new(d);

    const double span = cfg.t_end - t0;
    const long steps = std::max(1L, std::lround(span / cfg.h_init));
    const double h = span / static_cast<double>(steps);

    if (!try_eval(rhs, t0, z, k1)) throw IntegrationError("non-finite right-hand side at t0", traj, t0, z);
    sampler.start(z);
    for (long i = 0; i < steps; ++i) {
        const double t = t0 + static_cast<double>(i) * h;
        const double t_new = i + 1 == steps ? cfg.t_end : t0 + static_cast<double>(i + 1) * h;
        const double he = t_new - t;
        stage = z + (0.5 * he) * k1;
        bool ok = try_eval(rhs, t + 0.5 * he, stage, k2);
        if (ok) {
            stage = z + (0.5 * he) * k2;
            ok = try_eval(rhs, t + 0.5 * he, stage, k3);
        }
        if (ok) {
            stage = z + he * k3;
            ok = try_eval(rhs, t_new, stage, k4);
        }
        if (ok) {
            z_new = z + (he / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            ok = try_eval(rhs, t_new, z_new, f_new);
        }
        if (!ok) throw IntegrationError("non-finite right-hand side", traj, t, z);
        sampler.step(t, he, z, k1, z_new, f_new);
        record_step(traj.step_stats, he);
        z.swap(z_new);
        k1.swap(f_new);
    }
    sampler.finish(z);
    return traj;
}

}  // namespace

Trajectory integrate(OdeRhs rhs, double t0, const Vector& z0, const IntegratorConfig& cfg) {
    cfg.validate(t0);
    if (!rhs) throw std::invalid_argument("integrate: empty right-hand side");
    if (!z0.allFinite()) throw NonFiniteError("integrate: initial state is not finite");
    if (cfg.method == Method::FixedRK4) return integrate_rk4(rhs, t0, z0, cfg);
    return integrate_bs23(rhs, t0, z0, cfg);
}

OrderEstimate convergence_order_estimate(const OdeRhs& rhs, double t0, const Vector& z0, double t_end,
                                         const std::vector<double>& step_sizes, Method method,
                                         const std::function<Vector(double)>& exact) {
    if (step_sizes.size() < 3) throw std::invalid_argument("convergence_order_estimate: need at least 3 step sizes");

    auto run = [&](Method mth, double h) {
        IntegratorConfig cfg;
        cfg.method = mth;
        cfg.fixed_step = true;
        cfg.h_init = h;
        cfg.h_min = h;
        cfg.h_max = h;
        cfg.t_end = t_end;
        cfg.sample_every = t_end - t0;
        return integrate(rhs, t0, z0, cfg).back().z;
    };

    Vector reference;
    if (exact) {
        reference = exact(t_end);
    } else {
        const double h_min = *std::min_element(step_sizes.begin(), step_sizes.end());
        reference = run(Method::FixedRK4, h_min / 64.0);
    }

    OrderEstimate est;
    est.step_sizes = step_sizes;
    std::vector<double> lx, ly;
    for (double h : step_sizes) {
        const double e = (run(method, h) - reference).lpNorm<Eigen::Infinity>();
        est.errors.push_back(e);
        if (e > 0.0) {
            lx.push_back(std::log(h));
            ly.push_back(std::log(e));
        }
    }
    if (lx.size() < 2) {
        est.degenerate = true;
        est.slope = std::numeric_limits<double>::quiet_NaN();
        return est;
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    est.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return est;
}

}  // namespace pdflow
