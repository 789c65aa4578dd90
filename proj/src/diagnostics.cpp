#include "pdflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pdflow {

namespace {

void check_dims(const EnergyParams& params, const Problem& p, const PhaseVector& z) {
    require_size(params.x_star, p.n(), "energy anchor x*");
    require_size(params.mu, p.m(), "energy anchor mu");
    require_size(z.x, p.n(), "state x");
    require_size(z.lambda, p.m(), "state lambda");
    require_size(z.vx, p.n(), "state x'");
    require_size(z.vlambda, p.m(), "state lambda'");
}

double quad_weight(double alpha) { return alpha * (alpha - 3.0) / 9.0; }

}  // namespace

double energy_E_mu(const EnergyParams& params, const Problem& p, double t, const PhaseVector& z) {
    check_dims(params, p, z);
    const CoefficientSchedule& s = params.schedule;
    const double beta = beta_of_t(s, t).first;
    const double xi = s.xi.value(t);
    const double a = s.alpha;
    const double c3 = quad_weight(a);

    const Vector x_hat = z.x + beta * z.vx;
    const double gap = aug_lagrangian_value(p, x_hat, params.mu) - aug_lagrangian_value(p, params.x_star, params.mu);
    const Vector dx = z.x - params.x_star;
    const Vector dl = z.lambda - params.mu;

    return t * t * xi * gap + 0.5 * ((2.0 * a / 3.0) * dx + t * z.vx).squaredNorm() + c3 * dx.squaredNorm() +
           0.5 * ((2.0 * a / 3.0) * dl + t * z.vlambda).squaredNorm() + c3 * dl.squaredNorm();
}

double energy_E_eps(const EnergyParams& params, const Problem& p, double t, const PhaseVector& z) {
    const double e = energy_E_mu(params, p, t, z);
    const CoefficientSchedule& s = params.schedule;
    if (s.eps.is_zero()) return e;
    return e + 0.5 * t * t * s.xi.value(t) * s.eps.value(t) * z.x.squaredNorm();
}

double energy_derivative_analytic(const EnergyParams& params, const Problem& p, double t, const PhaseVector& z,
                                  const PhaseVector& zdot) {
    check_dims(params, p, z);
    require_size(zdot.x, p.n(), "derivative x'");
    require_size(zdot.vx, p.n(), "derivative x''");
    require_size(zdot.lambda, p.m(), "derivative lambda'");
    require_size(zdot.vlambda, p.m(), "derivative lambda''");

    const CoefficientSchedule& s = params.schedule;
    const auto [beta, beta_dot] = beta_of_t(s, t);
    const double xi = s.xi.value(t);
    const double xi_dot = s.xi.derivative(t);
    const double a = s.alpha;
    const double c3 = quad_weight(a);

    const Vector x_hat = z.x + beta * z.vx;
    const double gap = aug_lagrangian_value(p, x_hat, params.mu) - aug_lagrangian_value(p, params.x_star, params.mu);
    const Vector grad = grad_x_aug_lagrangian(p, x_hat, params.mu);
    const Vector x_hat_dot = (1.0 + beta_dot) * z.vx + beta * zdot.vx;

    const Vector dx = z.x - params.x_star;
    const Vector dl = z.lambda - params.mu;
    const Vector ux = (2.0 * a / 3.0) * dx + t * z.vx;
    const Vector ul = (2.0 * a / 3.0) * dl + t * z.vlambda;
    const Vector ux_dot = (2.0 * a / 3.0 + 1.0) * z.vx + t * zdot.vx;
    const Vector ul_dot = (2.0 * a / 3.0 + 1.0) * z.vlambda + t * zdot.vlambda;

    return (2.0 * t * xi + t * t * xi_dot) * gap + t * t * xi * grad.dot(x_hat_dot) + ux.dot(ux_dot) +
           2.0 * c3 * dx.dot(z.vx) + ul.dot(ul_dot) + 2.0 * c3 * dl.dot(z.vlambda);
}

double energy_eps_derivative_analytic(const EnergyParams& params, const Problem& p, double t, const PhaseVector& z,
                                      const PhaseVector& zdot) {
    const double d = energy_derivative_analytic(params, p, t, z, zdot);
    const CoefficientSchedule& s = params.schedule;
    if (s.eps.is_zero()) return d;
    const double xi = s.xi.value(t), xi_dot = s.xi.derivative(t);
    const double eps = s.eps.value(t), eps_dot = s.eps.derivative(t);
    const double w_dot = 2.0 * t * xi * eps + t * t * xi_dot * eps + t * t * xi * eps_dot;
    return d + 0.5 * w_dot * z.x.squaredNorm() + t * t * xi * eps * z.x.dot(z.vx);
}

DiagnosticsContext::DiagnosticsContext(Problem problem, CoefficientSchedule schedule, SystemKind kind)
    : DiagnosticsContext(problem, std::move(schedule), kind, resolve_saddle(problem)) {}

DiagnosticsContext::DiagnosticsContext(Problem problem, CoefficientSchedule schedule, SystemKind kind,
                                       SaddlePoint saddle)
    : problem_(std::move(problem)), kind_(kind), saddle_(std::move(saddle)) {
    require_size(saddle_.x, problem_.n(), "saddle x*");
    require_size(saddle_.lambda, problem_.m(), "saddle lambda*");
    params_ = EnergyParams{saddle_.lambda, saddle_.x, effective_schedule(schedule, kind)};
    params_.schedule.validate();
}

namespace {

DiagnosticsRecord make_record(const DiagnosticsContext& ctx, double t, const PhaseVector& z, const PhaseVector& zdot) {
    const Problem& p = ctx.problem();
    const EnergyParams& ep = ctx.energy_params();
    const double beta = beta_of_t(ep.schedule, t).first;
    const Vector x_hat = z.x + beta * z.vx;

    DiagnosticsRecord r;
    r.t = t;
    r.gap_at_xhat = aug_lagrangian_value(p, x_hat, ep.mu) - aug_lagrangian_value(p, ep.x_star, ep.mu);
    r.feasibility_at_xhat = feasibility(p, x_hat);
    r.iterate_error = (z.x - ep.x_star).norm();
    r.velocity_norm = std::sqrt(z.vx.squaredNorm() + z.vlambda.squaredNorm());
    r.energy_E = energy_E_mu(ep, p, t, z);
    r.energy_E_eps = energy_E_eps(ep, p, t, z);
    r.dE_dt_analytic = energy_eps_derivative_analytic(ep, p, t, z, zdot);
    return r;
}

}  // namespace

DiagnosticsRecord DiagnosticsContext::evaluate(double t, const PhaseVector& z) const {
    const PhaseVector zdot = rhs(params_.schedule, problem_, kind_, t, z);
    return make_record(*this, t, z, zdot);
}

std::vector<DiagnosticsRecord> DiagnosticsContext::evaluate(const Trajectory& traj) const {
    PrimalDualField field(problem_, params_.schedule, kind_);
    const Eigen::Index n = problem_.n(), m = problem_.m();
    Vector dz(field.state_size());
    std::vector<DiagnosticsRecord> out;
    out.reserve(traj.samples.size());
    for (const TrajectorySample& s : traj.samples) {
        field(s.t, s.z, dz);
        out.push_back(make_record(*this, s.t, PhaseVector::unpack(s.z, n, m), PhaseVector::unpack(dz, n, m)));
    }
    return out;
}

DescentReport descent_check(const Trajectory& traj, const DiagnosticsContext& ctx) {
    if (traj.samples.size() < 10) throw std::invalid_argument("descent_check: need at least 10 samples");
    return descent_check(ctx.evaluate(traj), ctx);
}

DescentReport descent_check(const std::vector<DiagnosticsRecord>& records, const DiagnosticsContext& ctx) {
    const long n_samples = static_cast<long>(records.size());
    if (n_samples < 10) throw std::invalid_argument("descent_check: need at least 10 samples");
    const CoefficientSchedule& s = ctx.energy_params().schedule;
    const double x_star_sq = ctx.energy_params().x_star.squaredNorm();
    const bool tikhonov = !s.eps.is_zero();

    std::vector<double> excess(records.size());
    long last_violation = -1;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const DiagnosticsRecord& r = records[i];
        const double energy = tikhonov ? r.energy_E_eps : r.energy_E;
        double bound = 1e-7 * (1.0 + std::abs(energy));
        if (tikhonov) bound += (s.alpha / 3.0) * r.t * s.xi.value(r.t) * s.eps.value(r.t) * x_star_sq;
        excess[i] = r.dE_dt_analytic - bound;
        if (excess[i] > 0.0) last_violation = static_cast<long>(i);
    }

    const long start = std::min(last_violation + 1, n_samples / 2);
    DescentReport rep;
    rep.samples = n_samples;
    rep.t2_detected = records[static_cast<std::size_t>(start)].t;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < n_samples; ++i) {
        const double e = excess[static_cast<std::size_t>(i)];
        if (i < start) {
            if (e > 0.0) ++rep.violations_before_t2;
        } else {
            if (e > 0.0) ++rep.violations;
            rep.max_violation = std::max(rep.max_violation, e);
        }
    }
    return rep;
}

RateFit rate_fit(const MetricSeries& series, std::pair<double, double> window) {
    if (!(window.first < window.second)) throw std::invalid_argument("rate_fit: window must satisfy t_lo < t_hi");
    RateFit fit;
    fit.window = window;
    std::vector<double> lx, ly;
    for (const auto& [t, v] : series) {
        if (t < window.first || t > window.second) continue;
        if (v > 0.0 && t > 0.0 && std::isfinite(v)) {
            lx.push_back(std::log(t));
            ly.push_back(std::log(v));
        } else {
            ++fit.dropped;
        }
    }
    fit.used = static_cast<long>(lx.size());
    if (fit.used < 5) throw std::invalid_argument("rate_fit: fewer than 5 usable points in window");
    fit.unreliable = static_cast<double>(fit.dropped) > 0.2 * static_cast<double>(fit.used + fit.dropped);

    const double n = static_cast<double>(fit.used);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("rate_fit: window contains a single time value");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

double scaled_sup(const MetricSeries& series, const std::function<double(double)>& scale,
                  std::pair<double, double> window) {
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& [t, v] : series) {
        if (t < window.first || t > window.second) continue;
        best = std::max(best, scale(t) * v);
        any = true;
    }
    if (!any) throw std::invalid_argument("scaled_sup: no samples in window");
    return best;
}

MetricSeries metric_series(const std::vector<DiagnosticsRecord>& records, double DiagnosticsRecord::*field) {
    MetricSeries out;
    out.reserve(records.size());
    for (const DiagnosticsRecord& r : records) out.emplace_back(r.t, r.*field);
    return out;
}

long count_local_maxima(const std::vector<double>& values, int median_width) {
    if (median_width < 1 || median_width % 2 == 0) throw std::invalid_argument("median width must be odd and positive");
    const long n = static_cast<long>(values.size());
    const long half = median_width / 2;
    std::vector<double> smooth(values.size()), buf;
    for (long i = 0; i < n; ++i) {
        const long k = std::min({half, i, n - 1 - i});
        buf.assign(values.begin() + (i - k), values.begin() + (i + k + 1));
        std::nth_element(buf.begin(), buf.begin() + k, buf.end());
        smooth[static_cast<std::size_t>(i)] = buf[static_cast<std::size_t>(k)];
    }
    // the median turns sharp peaks into short plateaus; a plateau counts once
    // when it is entered from below and left downward
    long count = 0;
    for (long i = 1; i + 1 < n;) {
        const auto u = static_cast<std::size_t>(i);
        if (!(smooth[u] > smooth[u - 1])) {
            ++i;
            continue;
        }
        long j = i;
        while (j + 1 < n && smooth[static_cast<std::size_t>(j + 1)] == smooth[u]) ++j;
        if (j + 1 < n && smooth[static_cast<std::size_t>(j + 1)] < smooth[u]) ++count;
        i = j + 1;
    }
    return count;
}

long ball_crossings(const Trajectory& traj, Eigen::Index n, double radius) {
    long crossings = 0;
    int side = 0;
    for (const TrajectorySample& s : traj.samples) {
        const double d = s.z.head(n).norm() - radius;
        const int now = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (now == 0) continue;
        if (side != 0 && now != side) ++crossings;
        side = now;
    }
    return crossings;
}

IntegralEstimates integral_estimates(const std::vector<DiagnosticsRecord>& records, const CoefficientSchedule& s) {
    IntegralEstimates out;
    if (records.size() < 2) return out;
    const double t_mid = 0.5 * (records.front().t + records.back().t);
    double first[3] = {0, 0, 0}, second[3] = {0, 0, 0};
    auto integrands = [&](const DiagnosticsRecord& r, double* f) {
        const double xi = s.xi.value(r.t);
        f[0] = r.t * xi * r.gap_at_xhat;
        f[1] = r.t * r.velocity_norm * r.velocity_norm;
        f[2] = r.t * xi * r.feasibility_at_xhat * r.feasibility_at_xhat;
    };
    double fa[3], fb[3];
    integrands(records.front(), fa);
    for (std::size_t i = 1; i < records.size(); ++i) {
        integrands(records[i], fb);
        const double dt = records[i].t - records[i - 1].t;
        double* acc = records[i].t <= t_mid ? first : second;
        for (int k = 0; k < 3; ++k) {
            acc[k] += 0.5 * dt * (fa[k] + fb[k]);
            fa[k] = fb[k];
        }
    }
    out.gap = first[0] + second[0];
    out.velocity = first[1] + second[1];
    out.feasibility = first[2] + second[2];
    out.bounded = true;
    for (int k = 0; k < 3; ++k) {
        const double total = first[k] + second[k];
        if (!std::isfinite(total) || std::abs(second[k]) > 0.1 * std::abs(total)) out.bounded = false;
    }
    return out;
}

}  // namespace pdflow
