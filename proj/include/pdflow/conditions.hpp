#pragma once

// Checks which convergence hypotheses a coefficient schedule satisfies.
// Power-law xi = c t^p with eps = a / t^r is decided by exponent calculus;
// any other combination is sampled and integrated numerically.

#include "pdflow/schedule.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdflow {

struct GrowthResult {
    bool ok = false;
    /// Largest delta with (2 - 2 alpha/3) + t xi'/xi < -delta; <= 0 when not ok.
    double delta_max = 0.0;
};

/// (2 - 2 alpha / 3) + t xi'(t) / xi(t) < -delta for some delta > 0.
GrowthResult check_growth_condition(const CoefficientSchedule& s);

struct EpsDecayResult {
    bool ok = false;
    std::optional<double> M;  ///< admissible constant when it is pinned by a boundary case
    std::string note;
};

/// 2 eps'(t) + M |gamma + beta / t| xi(t) eps(t)^2 <= 0 for some M > 1.
/// Throws std::invalid_argument when eps is Zero.
EpsDecayResult check_eps_decay(const CoefficientSchedule& s);

struct ConditionReport {
    bool ihd_mode = false;  ///< no Tikhonov term; only the growth condition is meaningful
    bool growth_ok = false;
    double delta_max = 0.0;
    bool eps_decay_ok = false;
    bool rate_estimates_ok = false;      ///< integral and pointwise rate estimates hold
    bool velocity_vanishes_ok = false;
    bool strong_convergence_ok = false;  ///< to the minimum-norm solution
    bool numeric = false;                ///< decided by quadrature rather than exponents
    std::vector<std::string> notes;
};

/// Symbolic for power-law families, numeric otherwise.
ConditionReport check_theorem_conditions(const CoefficientSchedule& s);

/// Numeric path, usable on any schedule: integrals up to `horizon` with a
/// decade-increment tail test, limits from log-log slopes over
/// [horizon / 1e3, horizon].
ConditionReport check_theorem_conditions_numeric(const CoefficientSchedule& s, double horizon = 1e6);

struct TailEstimate {
    double value = 0.0;        ///< integral over [t0, horizon]
    double contraction = 0.0;  ///< last decade increment / previous decade increment
    bool converged = false;    ///< contraction < 0.9
};

/// Integral of f over [t0, horizon] in log-spaced composite Simpson steps.
TailEstimate integral_tail(const ScalarFn& f, double t0, double horizon);

enum class LimitTrend { ToZero, Bounded, ToInfinity };

/// Classifies the behaviour of a positive f from its log-log slope over [lo, hi].
LimitTrend limit_trend(const ScalarFn& f, double lo, double hi);

/// (1 / (t^2 xi eps)) * integral_{t0}^{t} s^2 xi(s)^2 eps(s)^2 ds.
double strong_convergence_ratio(const CoefficientSchedule& s, double t);

/// "strong convergence: SATISFIED; rate estimates: NOT SATISFIED"
std::string summary_line(const ConditionReport& r);

/// Multi-line human-readable report.
std::string render_text(const ConditionReport& r);

}  // namespace pdflow
