#pragma once

#include "pdflow/types.hpp"

#include <functional>
#include <limits>
#include <string_view>
#include <vector>

namespace pdflow {

/// z' = f(t, z). The callable writes f(t, z) into its third argument, which
/// is already sized like z. It may keep scratch state (it is invoked through
/// a non-const std::function), so do not share one across threads.
using OdeRhs = std::function<void(double, const Vector&, Vector&)>;

enum class Method {
    AdaptiveBS23,  ///< Bogacki-Shampine 3(2) with error control
    FixedRK4,      ///< classical fourth-order Runge-Kutta, step h_init
};

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

struct IntegratorConfig {
    Method method = Method::AdaptiveBS23;
    double rtol = 1e-6;
    double atol = 1e-9;
    double h_init = 1e-3;
    double h_min = 1e-14;
    double h_max = 0.1;
    double t_end = 50.0;
    double sample_every = 0.05;
    /// AdaptiveBS23 only: take constant steps of h_init without error control.
    bool fixed_step = false;

    void validate(double t0) const;
};

struct StepStats {
    long accepted = 0;
    long rejected = 0;
    double min_h = std::numeric_limits<double>::infinity();
    double max_h = 0.0;
};

struct TrajectorySample {
    double t = 0.0;
    Vector z;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    StepStats step_stats;

    bool empty() const { return samples.empty(); }
    const TrajectorySample& back() const { return samples.back(); }
};

/// Raised on step-size underflow or a non-finite right-hand side. Carries the
/// samples emitted so far and the last accepted state.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, Trajectory partial, double t_last, Vector z_last)
        : std::runtime_error(what), partial_(std::move(partial)), t_last_(t_last), z_last_(std::move(z_last)) {}

    const Trajectory& partial() const { return partial_; }
    double t_last() const { return t_last_; }
    const Vector& z_last() const { return z_last_; }

private:
    Trajectory partial_;
    double t_last_;
    Vector z_last_;
};

/// Integrates on [t0, cfg.t_end]. Samples are emitted at t0 + k * sample_every
/// by cubic Hermite interpolation over the accepted step containing them,
/// and at t_end.
Trajectory integrate(OdeRhs rhs, double t0, const Vector& z0, const IntegratorConfig& cfg);

struct OrderEstimate {
    double slope = 0.0;
    bool degenerate = false;  ///< all errors vanished; slope is meaningless
    std::vector<double> step_sizes;
    std::vector<double> errors;
};

/// Least-squares slope of log(global error at t_end) against log(h) over
/// fixed-step runs with the given step sizes. The reference is `exact` when
/// supplied, otherwise an RK4 run with step min(h) / 64.
OrderEstimate convergence_order_estimate(const OdeRhs& rhs, double t0, const Vector& z0, double t_end,
                                         const std::vector<double>& step_sizes, Method method,
                                         const std::function<Vector(double)>& exact = {});

}  // namespace pdflow
