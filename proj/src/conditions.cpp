#include "pdflow/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pdflow {

namespace {

constexpr double kEdge = 1e-12;        // exponent equalities closer than this are boundary cases
constexpr double kContraction = 0.9;   // a decade increment must shrink by 10% for a convergent tail
constexpr int kSimpsonPerDecade = 256;
constexpr int kSamplePoints = 400;

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(points));
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < points; ++i) g.push_back(std::exp(a + (b - a) * i / (points - 1)));
    return g;
}

double central_difference(const ScalarFn& f, double t) {
    const double h = 1e-5 * t;
    return (f(t + h) - f(t - h)) / (2.0 * h);
}

double xi_dot(const CoefficientSchedule& s, double t) {
    if (s.xi.has_derivative()) return s.xi.derivative(t);
    return central_difference([&](double u) { return s.xi.value(u); }, t);
}

double eps_dot(const CoefficientSchedule& s, double t) {
    if (s.eps.has_derivative()) return s.eps.derivative(t);
    return central_difference([&](double u) { return s.eps.value(u); }, t);
}

// Ln-space Simpson rule on [lo, hi].
double simpson_log(const ScalarFn& f, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    const double a = std::log(lo), b = std::log(hi);
    int n = static_cast<int>(std::ceil(kSimpsonPerDecade * (b - a) / std::log(10.0)));
    n = std::max(2, n + (n % 2));
    const double h = (b - a) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double u = a + i * h;
        const double t = std::exp(u);
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * f(t) * t;
    }
    return acc * h / 3.0;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

bool power_laws(const CoefficientSchedule& s) { return s.xi.as_power_law() && s.eps.as_inverse_power(); }

GrowthResult growth_sampled(const CoefficientSchedule& s) {
    double sup = -std::numeric_limits<double>::infinity();
    for (double t : log_grid(s.t0, 1e4 * s.t0, kSamplePoints)) {
        sup = std::max(sup, 2.0 - 2.0 * s.alpha / 3.0 + t * xi_dot(s, t) / s.xi.value(t));
    }
    return {sup < 0.0, -sup};
}

EpsDecayResult eps_decay_sampled(const CoefficientSchedule& s) {
    constexpr double M = 1.0 + 1e-6;
    EpsDecayResult res;
    res.ok = true;
    for (double t : log_grid(s.t0, 1e4 * s.t0, kSamplePoints)) {
        const double e = s.eps.value(t);
        const double lhs = 2.0 * eps_dot(s, t) + M * std::abs(s.gamma + s.beta_shift / t) * s.xi.value(t) * e * e;
        if (lhs > 1e-14 * std::max(1.0, e)) {
            res.ok = false;
            std::ostringstream os;
            os << "sampled check fails at t = " << t;
            res.note = os.str();
            return res;
        }
    }
    // A slowly growing quadratic term can overtake -2 eps' far past the grid,
    // so also require its ratio to -2 eps' not to grow over later decades.
    auto ratio = [&](double t) {
        const double e = s.eps.value(t);
        return M * std::abs(s.gamma + s.beta_shift / t) * s.xi.value(t) * e * e / (-2.0 * eps_dot(s, t));
    };
    const double q1 = ratio(1e6 * s.t0), q2 = ratio(1e8 * s.t0);
    if (!(q1 >= 0.0 && q2 >= 0.0)) {
        res.ok = false;
        res.note = "eps' is not negative on the far tail";
        return res;
    }
    if (q1 > 0.0 && q2 > 0.0) {
        const double slope = std::log(q2 / q1) / std::log(100.0);
        if (slope > 1e-3) {
            res.ok = false;
            res.note = "quadratic term grows like t^" + fmt(slope) + " relative to eps' and eventually dominates";
            return res;
        }
    }
    res.M = M;
    res.note = "sampled on [t0, 1e4 t0] with M = 1 + 1e-6, tail trend to 1e8 t0 (heuristic)";
    return res;
}


}  // namespace

GrowthResult check_growth_condition(const CoefficientSchedule& s) {
    if (const auto* pl = s.xi.as_power_law()) {
        const double delta = 2.0 * s.alpha / 3.0 - 2.0 - pl->p;
        return {delta > kEdge, delta};
    }
    return growth_sampled(s);
}

EpsDecayResult check_eps_decay(const CoefficientSchedule& s) {
    if (s.eps.is_zero()) throw std::invalid_argument("assumption check needs a nonzero eps family");
    EpsDecayResult res;
    if (s.gamma == 0.0 && s.beta_shift == 0.0) {
        res.ok = true;
        res.note = "holds trivially: gamma = beta = 0 removes the quadratic term";
        return res;
    }
    if (!power_laws(s)) return eps_decay_sampled(s);

    const auto* pl = s.xi.as_power_law();
    const auto* ip = s.eps.as_inverse_power();
    if (ip->r == 0.0) {
        res.note = "constant eps: eps' = 0 cannot absorb the positive quadratic term";
        return res;
    }
    // Leading growth of M |gamma + beta/t| xi eps^2 relative to -2 eps'.
    const bool with_gamma = s.gamma > 0.0;
    const double coef = with_gamma ? s.gamma : s.beta_shift;
    const double k = with_gamma ? pl->p - ip->r + 1.0 : pl->p - ip->r;
    if (k < -kEdge) {
        res.ok = true;
        res.note = "eps' dominates: exponent " + fmt(k) + " < 0";
        return res;
    }
    if (k > kEdge) {
        res.note = "quadratic term dominates: exponent " + fmt(k) + " > 0";
        return res;
    }
    const double limit = 2.0 * ip->r / (coef * pl->c);
    res.ok = ip->a <= limit * (1.0 - 1e-6);
    res.M = 2.0 * ip->r / (coef * pl->c * ip->a);
    res.note = "boundary exponent: needs a < " + fmt(limit) + ", induced M = " + fmt(*res.M);
    return res;
}

TailEstimate integral_tail(const ScalarFn& f, double t0, double horizon) {
    if (!(horizon >= 100.0 * t0)) throw std::invalid_argument("integral_tail: horizon must be at least 100 t0");
    const double d0 = horizon / 100.0, d1 = horizon / 10.0;
    const double head = simpson_log(f, t0, d0);
    const double inc1 = simpson_log(f, d0, d1);
    const double inc2 = simpson_log(f, d1, horizon);
    TailEstimate est;
    est.value = head + inc1 + inc2;
    est.contraction = inc1 > 0.0 ? inc2 / inc1 : (inc2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    est.converged = std::isfinite(est.value) && est.contraction < kContraction;
    return est;
}

LimitTrend limit_trend(const ScalarFn& f, double lo, double hi) {
    const double slope = (std::log(f(hi)) - std::log(f(lo))) / (std::log(hi) - std::log(lo));
    const double tau = std::log10(1.0 / kContraction);
    if (slope > tau) return LimitTrend::ToInfinity;
    if (slope < -tau) return LimitTrend::ToZero;
    return LimitTrend::Bounded;
}

double strong_convergence_ratio(const CoefficientSchedule& s, double t) {
    const ScalarFn integrand = [&](double u) {
        const double v = u * s.xi.value(u) * s.eps.value(u);
        return v * v;
    };
    return simpson_log(integrand, s.t0, t) / (t * t * s.xi.value(t) * s.eps.value(t));
}

ConditionReport check_theorem_conditions(const CoefficientSchedule& s) {
    ConditionReport rep;
    const auto* pl = s.xi.as_power_law();
    if (!pl || (!s.eps.is_zero() && !s.eps.as_inverse_power())) return check_theorem_conditions_numeric(s);

    const GrowthResult gc = check_growth_condition(s);
    rep.growth_ok = gc.ok;
    rep.delta_max = gc.delta_max;
    if (std::abs(gc.delta_max) <= kEdge) rep.notes.push_back("growth condition: boundary, margin is zero");
    if (s.eps.is_zero()) {
        rep.ihd_mode = true;
        rep.notes.push_back("no Tikhonov term: eps conditions are vacuous");
        return rep;
    }

    const double p = pl->p, r = s.eps.as_inverse_power()->r;
    const EpsDecayResult decay = check_eps_decay(s);
    rep.eps_decay_ok = decay.ok;
    rep.notes.push_back("eps decay: " + decay.note);

    auto edge = [](double a, double b) { return std::abs(a - b) <= kEdge; };
    rep.rate_estimates_ok = r > p + 2.0 + kEdge && p > -2.0 + kEdge;
    if (edge(r, p + 2.0) || edge(p, -2.0)) rep.notes.push_back("rates: boundary (r = p + 2 or p = -2)");
    rep.velocity_vanishes_ok = r > p + kEdge;
    if (edge(r, p)) rep.notes.push_back("velocity: boundary (r = p)");
    rep.strong_convergence_ok = p >= 0.0 && r > p + 1.0 + kEdge && r < p + 2.0 - kEdge && rep.growth_ok && rep.eps_decay_ok;
    if (edge(r, p + 1.0) || edge(r, p + 2.0)) rep.notes.push_back("strong convergence: boundary (r = p + 1 or r = p + 2)");
    return rep;
}

ConditionReport check_theorem_conditions_numeric(const CoefficientSchedule& s, double horizon) {
    ConditionReport rep;
    rep.numeric = true;
    const GrowthResult gc = growth_sampled(s);
    rep.growth_ok = gc.ok;
    rep.delta_max = gc.delta_max;
    if (s.eps.is_zero()) {
        rep.ihd_mode = true;
        rep.notes.push_back("no Tikhonov term: eps conditions are vacuous");
        return rep;
    }

    const EpsDecayResult decay = (s.gamma == 0.0 && s.beta_shift == 0.0) ? check_eps_decay(s)
                                                                           : eps_decay_sampled(s);
    rep.eps_decay_ok = decay.ok;
    rep.notes.push_back("eps decay: " + decay.note);

    const double t0 = s.t0;
    const double lo = horizon / 1e3;
    const ScalarFn xi = [&](double t) { return s.xi.value(t); };
    const ScalarFn t2xi = [&](double t) { return t * t * s.xi.value(t); };
    const ScalarFn t2xieps = [&](double t) { return t * t * s.xi.value(t) * s.eps.value(t); };

    const TailEstimate rate_integral = integral_tail([&](double t) { return t * s.xi.value(t) * s.eps.value(t); }, t0, horizon);
    const TailEstimate vel_integral = integral_tail([&](double t) { return s.xi.value(t) * s.eps.value(t) / t; }, t0, horizon);
    rep.rate_estimates_ok = rate_integral.converged && limit_trend(t2xi, lo, horizon) == LimitTrend::ToInfinity;
    rep.velocity_vanishes_ok = vel_integral.converged;

    const double r_lo = strong_convergence_ratio(s, horizon / 1e3);
    const double r_hi = strong_convergence_ratio(s, horizon / 1e2);
    const bool ratio_vanishes = r_hi < kContraction * r_lo;
    rep.strong_convergence_ok = limit_trend(xi, lo, horizon) != LimitTrend::ToZero &&
                   limit_trend(t2xieps, lo, horizon) == LimitTrend::ToInfinity && ratio_vanishes && rep.growth_ok &&
                   rep.eps_decay_ok && rep.velocity_vanishes_ok;

    auto undecided = [](const TailEstimate& e) {
        return e.contraction >= kContraction && e.contraction <= 1.0 / kContraction;
    };
    if (undecided(rate_integral) || undecided(vel_integral)) rep.notes.push_back("heuristic: tail contraction near 1, undecided");
    rep.notes.push_back("heuristic: integrals to t = " + fmt(horizon) + " with a 10% decade-contraction tail test");
    return rep;
}

std::string summary_line(const ConditionReport& r) {
    if (r.ihd_mode) return std::string("IHD mode; growth condition: ") + (r.growth_ok ? "SATISFIED" : "NOT SATISFIED");
    auto word = [](bool ok) { return ok ? "SATISFIED" : "NOT SATISFIED"; };
    return std::string("strong convergence: ") + word(r.strong_convergence_ok) + "; rate estimates: " + word(r.rate_estimates_ok);
}

std::string render_text(const ConditionReport& r) {
    auto word = [&](bool ok) { return r.ihd_mode ? "not applicable" : (ok ? "yes" : "no"); };
    std::ostringstream os;
    os << summary_line(r) << '\n';
    os << "  mode:                      " << (r.ihd_mode ? "no Tikhonov term" : "Tikhonov") << (r.numeric ? ", numeric" : ", symbolic") << '\n';
    os << "  growth condition on xi:    " << (r.growth_ok ? "yes" : "no") << " (delta_max = " << r.delta_max << ")\n";
    os << "  eps decay assumption:      " << word(r.eps_decay_ok) << '\n';
    os << "  rate estimates:            " << word(r.rate_estimates_ok) << '\n';
    os << "  velocity vanishes:         " << word(r.velocity_vanishes_ok) << '\n';
    os << "  strong convergence:        " << word(r.strong_convergence_ok) << '\n';
    for (const std::string& n : r.notes) os << "  note: " << n << '\n';
    return os.str();
}

}  // namespace pdflow
