#pragma once

// Lyapunov energies, per-sample metrics, descent verification and rate fits
// along simulated trajectories.

#include "pdflow/dynamics.hpp"
#include "pdflow/integrator.hpp"
#include "pdflow/problem.hpp"
#include "pdflow/schedule.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace pdflow {

/// Anchor (x*, mu) of the energy and the schedule it is evaluated with. The
/// schedule should be the effective one of the simulated system.
struct EnergyParams {
    Vector mu;
    Vector x_star;
    CoefficientSchedule schedule;
};

/// E_mu(t) = t^2 xi (L_rho(x_hat, mu) - L_rho(x*, mu))
///         + 1/2 ||(2a/3)(x - x*) + t x'||^2 + a(a-3)/9 ||x - x*||^2
///         + 1/2 ||(2a/3)(lambda - mu) + t lambda'||^2 + a(a-3)/9 ||lambda - mu||^2
double energy_E_mu(const EnergyParams& params, const Problem& p, double t, const PhaseVector& z);

/// E_mu + t^2 xi eps / 2 ||x||^2.
double energy_E_eps(const EnergyParams& params, const Problem& p, double t, const PhaseVector& z);

/// dE_mu/dt by the chain rule, with zdot = F(t, Z) of the same schedule.
double energy_derivative_analytic(const EnergyParams& params, const Problem& p, double t, const PhaseVector& z,
                                  const PhaseVector& zdot);

/// dE^eps_mu/dt by the chain rule (equals energy_derivative_analytic when eps is zero).
double energy_eps_derivative_analytic(const EnergyParams& params, const Problem& p, double t, const PhaseVector& z,
                                      const PhaseVector& zdot);

struct DiagnosticsRecord {
    double t = 0.0;
    double gap_at_xhat = 0.0;          ///< L_rho(x_hat, lambda*) - L_rho(x*, lambda*)
    double feasibility_at_xhat = 0.0;  ///< ||A x_hat - b||
    double iterate_error = 0.0;        ///< ||x - x*||
    double velocity_norm = 0.0;        ///< ||(x', lambda')||
    double energy_E = 0.0;
    double energy_E_eps = 0.0;
    double dE_dt_analytic = 0.0;  ///< derivative of energy_E_eps
};

/// Everything needed to turn phase vectors of one simulation into records.
class DiagnosticsContext {
public:
    DiagnosticsContext(Problem problem, CoefficientSchedule schedule, SystemKind kind);
    DiagnosticsContext(Problem problem, CoefficientSchedule schedule, SystemKind kind, SaddlePoint saddle);

    DiagnosticsRecord evaluate(double t, const PhaseVector& z) const;
    std::vector<DiagnosticsRecord> evaluate(const Trajectory& traj) const;

    const Problem& problem() const { return problem_; }
    const EnergyParams& energy_params() const { return params_; }
    const SaddlePoint& saddle() const { return saddle_; }
    SystemKind kind() const { return kind_; }

private:
    Problem problem_;
    SystemKind kind_;
    SaddlePoint saddle_;
    EnergyParams params_;
};

struct DescentReport {
    double t2_detected = 0.0;
    long violations = 0;            ///< violations at samples t >= t2_detected
    long violations_before_t2 = 0;  ///< transient violations before t2_detected
    double max_violation = 0.0;     ///< max of dE/dt - bound over t >= t2_detected (<= 0 when clean)
    long samples = 0;
};

/// Verifies dE_{lambda*}/dt <= tol_E (IHD, Baseline) or
/// dE^eps_{lambda*}/dt <= (alpha/3) t xi eps ||x*||^2 + tol_E (IHDTR) with
/// tol_E = 1e-7 (1 + |E|) at every sample. t2 is placed one sample after the
/// last violation, but no later than the midpoint of the trajectory, so a
/// violation in the second half is always reported.
DescentReport descent_check(const Trajectory& traj, const DiagnosticsContext& ctx);
/// Same check on records already produced by ctx.evaluate(traj).
DescentReport descent_check(const std::vector<DiagnosticsRecord>& records, const DiagnosticsContext& ctx);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::pair<double, double> window;
    long used = 0;
    long dropped = 0;          ///< non-positive values skipped
    bool unreliable = false;   ///< more than 20% of the window was dropped
};

using MetricSeries = std::vector<std::pair<double, double>>;

/// Least-squares fit of log(value) against log(t) over window [lo, hi].
RateFit rate_fit(const MetricSeries& series, std::pair<double, double> window);

/// sup over the window of scale(t) * value(t).
double scaled_sup(const MetricSeries& series, const std::function<double(double)>& scale,
                  std::pair<double, double> window);

/// Extracts one metric column from records.
MetricSeries metric_series(const std::vector<DiagnosticsRecord>& records, double DiagnosticsRecord::*field);

/// Number of strict local maxima after a centred running median of width
/// `median_width` (odd; shrinks at the ends).
long count_local_maxima(const std::vector<double>& values, int median_width = 5);

/// Number of times ||x(t)|| crosses the sphere of radius `radius` between
/// consecutive samples.
long ball_crossings(const Trajectory& traj, Eigen::Index n, double radius);

/// Trapezoidal partial integrals of t xi gap, t ||v||^2 and t xi feas^2.
/// `bounded` flags that the second half of the window adds at most 10% to
/// each integral.
struct IntegralEstimates {
    double gap = 0.0;
    double velocity = 0.0;
    double feasibility = 0.0;
    bool bounded = false;
};

IntegralEstimates integral_estimates(const std::vector<DiagnosticsRecord>& records, const CoefficientSchedule& s);

}  // namespace pdflow
