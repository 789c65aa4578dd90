#pragma once

// Right-hand side of the first-order reformulation Z' = F(t, Z) with
// Z = (x, lambda, x', lambda') of the primal-dual flows
//
//   x''      = -(alpha/t) x' - xi(t) [grad_x L_rho(x_hat, lambda_bar) + eps(t) x]
//   lambda'' = -(alpha/t) lambda'
//              + xi(t) [(A x_bar - b) + eta(t) A x'
//                       - (3/(2 alpha)) t xi(t) beta(t) A (grad_x L_rho(x_hat, lambda_bar) + eps(t) x)]
//
// where x_hat = x + beta(t) x', (x_bar, lambda_bar) = (x, lambda) + (3/(2 alpha)) t (x', lambda')
// and eta(t) = (-alpha beta(t) + 3 t beta'(t)) / (2 alpha).

#include "pdflow/problem.hpp"
#include "pdflow/schedule.hpp"
#include "pdflow/types.hpp"

#include <string_view>
#include <utility>

namespace pdflow {

enum class SystemKind {
    IHD,       ///< implicit Hessian damping, no Tikhonov term
    IHDTR,     ///< implicit Hessian damping with Tikhonov term eps(t) x
    Baseline,  ///< gamma = beta = 0, no Tikhonov term
};

std::string_view to_string(SystemKind kind);
SystemKind system_from_string(std::string_view name);

struct PhaseVector {
    Vector x;
    Vector lambda;
    Vector vx;
    Vector vlambda;

    Eigen::Index n() const { return x.size(); }
    Eigen::Index m() const { return lambda.size(); }

    /// Flat layout [x | lambda | vx | vlambda].
    Vector pack() const;
    static PhaseVector unpack(const Vector& z, Eigen::Index n, Eigen::Index m);
    bool all_finite() const;
};

/// (beta(t), beta'(t)) = (gamma + beta/t, -beta/t^2).
std::pair<double, double> beta_of_t(const CoefficientSchedule& s, double t);

double eta_of_t(const CoefficientSchedule& s, double t);

struct ExtrapolatedPoints {
    Vector x_hat;
    Vector x_bar;
    Vector lambda_bar;
};

ExtrapolatedPoints extrapolated_points(const CoefficientSchedule& s, double t, const PhaseVector& z);

/// Schedule actually driving `kind`: IHD and Baseline drop eps, Baseline also
/// zeroes gamma and beta.
CoefficientSchedule effective_schedule(const CoefficientSchedule& s, SystemKind kind);

/// F(t, Z) returned as a phase-vector derivative (x', lambda', x'', lambda'').
PhaseVector rhs(const CoefficientSchedule& s, const Problem& p, SystemKind kind, double t, const PhaseVector& z);

/// Allocation-free evaluator of F(t, Z) on packed state vectors. Holds scratch
/// buffers, so one instance must not be shared between threads; copies are
/// independent.
class PrimalDualField {
public:
    PrimalDualField(Problem problem, CoefficientSchedule schedule, SystemKind kind);

    /// dz must have the packed size 2(n + m).
    void operator()(double t, const Vector& z, Vector& dz);

    const Problem& problem() const { return problem_; }
    /// Effective schedule (see effective_schedule).
    const CoefficientSchedule& schedule() const { return schedule_; }
    SystemKind kind() const { return kind_; }
    Eigen::Index state_size() const { return 2 * (problem_.n() + problem_.m()); }

private:
    Problem problem_;
    CoefficientSchedule schedule_;
    SystemKind kind_;

    Vector x_hat_, grad_f_, g_;
    Vector ax_, av_, r_hat_, mult_, ag_;
};

}  // namespace pdflow
