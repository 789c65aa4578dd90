#include "pdflow/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <sstream>
#include <stdexcept>

namespace pdflow {

namespace {

constexpr double kDerivativeTol = 1e-6;

double central_difference(const ScalarFn& f, double t) {
    const double h = 1e-5 * t;
    return (f(t + h) - f(t - h)) / (2.0 * h);
}

// Relative mismatch normalised by the natural derivative scale |f| / t so
// that a vanishing derivative does not blow up the ratio.
double relative_mismatch(const ScalarFn& f, double analytic, double t) {
    const double fd = central_difference(f, t);
    const double scale = std::max({std::abs(analytic), std::abs(f(t)) / t, 1e-300});
    return std::abs(fd - analytic) / scale;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(points));
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < points; ++i) g.push_back(std::exp(a + (b - a) * i / (points - 1)));
    return g;
}

}  // namespace

ScalingFamily ScalingFamily::power_law(double c, double p) {
    if (!(c > 0.0) || !std::isfinite(c) || !std::isfinite(p)) {
        throw std::invalid_argument("scaling family: power law needs c > 0 and finite p");
    }
    return ScalingFamily(PowerLaw{c, p});
}

ScalingFamily ScalingFamily::custom(ScalarFn value, ScalarFn derivative) {
    if (!value) throw std::invalid_argument("scaling family: custom value function is required");
    return ScalingFamily(Custom{std::move(value), std::move(derivative)});
}

double ScalingFamily::value(double t) const {
    if (const auto* pl = std::get_if<PowerLaw>(&v_)) return pl->p == 0.0 ? pl->c : pl->c * std::pow(t, pl->p);
    return std::get<Custom>(v_).value(t);
}

double ScalingFamily::derivative(double t) const {
    if (const auto* pl = std::get_if<PowerLaw>(&v_)) {
        return pl->p == 0.0 ? 0.0 : pl->c * pl->p * std::pow(t, pl->p - 1.0);
    }
    const auto& c = std::get<Custom>(v_);
    if (!c.derivative) throw std::logic_error("scaling family: custom xi has no derivative");
    return c.derivative(t);
}

bool ScalingFamily::has_derivative() const {
    if (const auto* c = std::get_if<Custom>(&v_)) return static_cast<bool>(c->derivative);
    return true;
}

TikhonovFamily TikhonovFamily::inverse_power(double a, double r) {
    if (!(a > 0.0) || !std::isfinite(a) || !(r >= 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("tikhonov family: inverse power needs a > 0 and r >= 0");
    }
    return TikhonovFamily(InversePower{a, r});
}

TikhonovFamily TikhonovFamily::custom(ScalarFn value, ScalarFn derivative, bool nonincreasing) {
    if (!value) throw std::invalid_argument("tikhonov family: custom value function is required");
    return TikhonovFamily(Custom{std::move(value), std::move(derivative), nonincreasing});
}

double TikhonovFamily::value(double t) const {
    if (std::holds_alternative<Zero>(v_)) return 0.0;
    if (const auto* ip = std::get_if<InversePower>(&v_)) {
        if (ip->r == 1.5) return ip->a / (t * std::sqrt(t));
        return ip->a * std::pow(t, -ip->r);
    }
    return std::get<Custom>(v_).value(t);
}

double TikhonovFamily::derivative(double t) const {
    if (std::holds_alternative<Zero>(v_)) return 0.0;
    if (const auto* ip = std::get_if<InversePower>(&v_)) return -ip->a * ip->r * std::pow(t, -ip->r - 1.0);
    const auto& c = std::get<Custom>(v_);
    if (!c.derivative) throw std::logic_error("tikhonov family: custom eps has no derivative");
    return c.derivative(t);
}

bool TikhonovFamily::has_derivative() const {
    if (const auto* c = std::get_if<Custom>(&v_)) return static_cast<bool>(c->derivative);
    return true;
}

void CoefficientSchedule::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("schedule: alpha must be > 0");
    if (!(t0 > 0.0) || !std::isfinite(t0)) throw std::invalid_argument("schedule: t0 must be > 0");
    if (!std::isfinite(gamma) || !std::isfinite(beta_shift)) throw std::invalid_argument("schedule: gamma and beta must be finite");
    const bool admissible = gamma > 0.0 || (gamma == 0.0 && beta_shift >= 0.0);
    if (!admissible) {
        std::ostringstream os;
        os << "schedule: need gamma > 0, or gamma = 0 with beta >= 0 (got gamma=" << gamma << ", beta=" << beta_shift << ")";
        throw std::invalid_argument(os.str());
    }

    const bool custom_xi = xi.as_power_law() == nullptr;
    const bool custom_eps = eps.as_custom() != nullptr;
    if (!custom_xi && !custom_eps) return;
    for (double t : log_grid(t0, 1e4 * t0, 64)) {
        if (custom_xi && !(xi.value(t) > 0.0)) throw std::invalid_argument("schedule: xi must be positive on [t0, inf)");
        if (custom_eps && !(eps.value(t) >= 0.0)) throw std::invalid_argument("schedule: eps must be nonnegative");
    }
    if (max_derivative_mismatch(*this, 1e4 * t0) > kDerivativeTol) {
        throw std::invalid_argument("schedule: supplied derivative disagrees with finite differences");
    }
}

double max_derivative_mismatch(const CoefficientSchedule& s, double t_hi, int points) {
    double worst = 0.0;
    const ScalarFn xi_fn = [&](double t) { return s.xi.value(t); };
    const ScalarFn eps_fn = [&](double t) { return s.eps.value(t); };
    // Stay strictly inside [t0, inf) for the backward difference.
    for (double t : log_grid(s.t0 * (1.0 + 1e-4), t_hi, points)) {
        if (s.xi.has_derivative()) worst = std::max(worst, relative_mismatch(xi_fn, s.xi.derivative(t), t));
        if (!s.eps.is_zero() && s.eps.has_derivative()) {
            worst = std::max(worst, relative_mismatch(eps_fn, s.eps.derivative(t), t));
        }
    }
    return worst;
}

}  // namespace pdflow
