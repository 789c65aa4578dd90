#pragma once

// Regularization path x_eps = argmin L_rho(x, lambda*) + (eps / 2) ||x||^2.

#include "pdflow/problem.hpp"

#include <vector>

namespace pdflow {

struct PathPoint {
    double eps = 0.0;
    Vector x_eps;
    double norm = 0.0;      ///< ||x_eps||
    double residual = 0.0;  ///< ||grad_x L_rho(x_eps, lambda*) + eps x_eps||
};

/// Quadratic objectives: Cholesky solve of (Q + rho A'A + eps I) x = -(q + A' lambda* - rho A' b)
/// with one refinement step. Callbacks: gradient descent with step
/// 1 / (L + rho ||A||^2 + eps) until the residual is <= 1e-8, at most 1e6
/// iterations. Requires eps >= 1e-12.
PathPoint tikhonov_point(const Problem& p, const Vector& lambda_star, double eps);

/// One point per entry of a strictly decreasing positive grid.
std::vector<PathPoint> path_scan(const Problem& p, const Vector& lambda_star, const std::vector<double>& eps_grid);

}  // namespace pdflow
