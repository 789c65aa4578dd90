#pragma once

// Time-dependent coefficients of the primal-dual flows:
//   viscous damping alpha / t,
//   extrapolation beta(t) = gamma + beta_shift / t,
//   time scaling xi(t) and Tikhonov weight eps(t).

#include <functional>
#include <optional>
#include <utility>
#include <variant>

namespace pdflow {

using ScalarFn = std::function<double(double)>;

class ScalingFamily {
public:
    /// xi(t) = c * t^p.
    struct PowerLaw {
        double c = 1.0;
        double p = 0.0;
    };
    /// The derivative may be left empty; only diagnostics and condition
    /// checks need it.
    struct Custom {
        ScalarFn value;
        ScalarFn derivative;
    };

    static ScalingFamily power_law(double c, double p);
    static ScalingFamily constant(double c = 1.0) { return power_law(c, 0.0); }
    static ScalingFamily custom(ScalarFn value, ScalarFn derivative = {});

    double value(double t) const;
    /// Throws std::logic_error when a Custom family has no derivative.
    double derivative(double t) const;
    bool has_derivative() const;

    const PowerLaw* as_power_law() const { return std::get_if<PowerLaw>(&v_); }

private:
    explicit ScalingFamily(std::variant<PowerLaw, Custom> v) : v_(std::move(v)) {}
    std::variant<PowerLaw, Custom> v_;
};

class TikhonovFamily {
public:
    struct Zero {};
    /// eps(t) = a / t^r.
    struct InversePower {
        double a = 1.0;
        double r = 1.0;
    };
    struct Custom {
        ScalarFn value;
        ScalarFn derivative;
        bool nonincreasing = true;
    };

    static TikhonovFamily zero() { return TikhonovFamily(Zero{}); }
    static TikhonovFamily inverse_power(double a, double r);
    static TikhonovFamily custom(ScalarFn value, ScalarFn derivative = {}, bool nonincreasing = true);

    double value(double t) const;
    double derivative(double t) const;
    bool has_derivative() const;
    bool is_zero() const { return std::holds_alternative<Zero>(v_); }

    const InversePower* as_inverse_power() const { return std::get_if<InversePower>(&v_); }
    const Custom* as_custom() const { return std::get_if<Custom>(&v_); }

private:
    explicit TikhonovFamily(std::variant<Zero, InversePower, Custom> v) : v_(std::move(v)) {}
    std::variant<Zero, InversePower, Custom> v_;
};

struct CoefficientSchedule {
    double alpha = 3.1;
    double gamma = 1.0;
    double beta_shift = -0.5;
    ScalingFamily xi = ScalingFamily::constant();
    TikhonovFamily eps = TikhonovFamily::zero();
    double t0 = 1.0;

    /// Throws std::invalid_argument on alpha <= 0, t0 <= 0, or
    /// (gamma, beta_shift) outside {gamma > 0} u {gamma = 0, beta_shift >= 0}.
    /// Custom families are sampled on [t0, 1e4 t0]: xi must stay positive,
    /// eps nonnegative, and provided derivatives must match central
    /// differences to 1e-6 relative.
    void validate() const;
};

/// Checks that the analytic derivatives of xi and eps agree with central
/// finite differences on a log-spaced grid over [t0, t_hi]. Returns the
/// worst relative discrepancy found.
double max_derivative_mismatch(const CoefficientSchedule& s, double t_hi, int points = 64);

}  // namespace pdflow
