#pragma once

// Linear-equality constrained convex programs
//
//     min f(x)  s.t.  A x = b
//
// together with the augmented Lagrangian
//
//     L_rho(x, lambda) = f(x) + <lambda, A x - b> + (rho / 2) ||A x - b||^2
//
// and the saddle-point / minimum-norm-solution oracle used by the rest of
// the library.

#include "pdflow/types.hpp"

#include <functional>
#include <optional>
#include <variant>

namespace pdflow {

class LinearConstraint {
public:
    LinearConstraint(Matrix A, Vector b);

    const Matrix& A() const { return A_; }
    const Vector& b() const { return b_; }
    Eigen::Index rows() const { return A_.rows(); }
    Eigen::Index cols() const { return A_.cols(); }

    /// Spectral norm ||A||_2.
    double operator_norm() const { return operator_norm_; }

private:
    Matrix A_;
    Vector b_;
    double operator_norm_ = 0.0;
};

/// f(x) = 1/2 x'Qx + q'x with Q symmetric positive semidefinite.
struct QuadraticObjective {
    Matrix Q;
    Vector q;
};

/// f(x) = (c'x)^2.
struct RankOneSquaredObjective {
    Vector c;
};

/// User supplied f and grad f. The gradient writes into its second argument,
/// which is already sized to n.
struct CallbackObjective {
    Eigen::Index dimension = 0;
    std::function<double(const Vector&)> value;
    std::function<void(const Vector&, Vector&)> gradient;
    std::optional<double> lipschitz;
};

class ConvexObjective {
public:
    static ConvexObjective quadratic(Matrix Q, Vector q);
    static ConvexObjective rank_one_squared(Vector c);
    static ConvexObjective callback(CallbackObjective cb);

    Eigen::Index dimension() const;
    double value(const Vector& x) const;
    /// out must already have size n.
    void gradient(const Vector& x, Vector& out) const;

    /// Hessian and linear term when f is quadratic (Quadratic, RankOneSquared).
    std::optional<QuadraticObjective> quadratic_form() const;

    /// Lipschitz constant of grad f when known.
    std::optional<double> lipschitz_bound() const;

    bool is_callback() const { return std::holds_alternative<CallbackObjective>(variant_); }

    using Variant = std::variant<QuadraticObjective, RankOneSquaredObjective, CallbackObjective>;
    const Variant& variant() const { return variant_; }

private:
    explicit ConvexObjective(Variant v) : variant_(std::move(v)) {}
    Variant variant_;
};

struct SaddlePoint {
    Vector x;
    Vector lambda;
};

class Problem {
public:
    Problem(ConvexObjective objective, LinearConstraint constraint, double rho,
            std::optional<SaddlePoint> known_saddle = std::nullopt);

    const ConvexObjective& objective() const { return objective_; }
    const LinearConstraint& constraint() const { return constraint_; }
    double rho() const { return rho_; }
    const std::optional<SaddlePoint>& known_saddle() const { return known_saddle_; }

    Eigen::Index n() const { return constraint_.cols(); }
    Eigen::Index m() const { return constraint_.rows(); }

    /// Copy of this problem with the saddle point attached (validated).
    Problem with_saddle(SaddlePoint saddle) const;

private:
    ConvexObjective objective_;
    LinearConstraint constraint_;
    double rho_;
    std::optional<SaddlePoint> known_saddle_;
};

/// Problem (52) family: f(x) = (m x1 + n x2 + e x3)^2 subject to
/// m x1 - n x2 + e x3 = 0. The minimum-norm solution is the origin and the
/// saddle point (0, 0) is attached.
Problem make_toy_problem(double m, double n, double e, double rho);

Vector objective_gradient(const Problem& p, const Vector& x);

Vector grad_x_aug_lagrangian(const Problem& p, const Vector& x, const Vector& lambda);

double aug_lagrangian_value(const Problem& p, const Vector& x, const Vector& lambda);

/// ||A x - b||.
double feasibility(const Problem& p, const Vector& x);

/// L_rho(x, lambda*) - L_rho(x*, lambda*) using the attached saddle point.
double primal_dual_gap(const Problem& p, const Vector& x);

/// Minimum-norm primal solution and least-norm associated multiplier.
/// Only for quadratic objectives; throws for callbacks, infeasible systems
/// and objectives unbounded below on the feasible set.
SaddlePoint minimum_norm_solution(const Problem& p);

/// Saddle point attached to p, or the minimum-norm one when none is attached.
SaddlePoint resolve_saddle(const Problem& p);

}  // namespace pdflow
