#include "pdflow/tikhonov_path.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pdflow {

namespace {

constexpr double kMinEps = 1e-12;
constexpr double kResidualTol = 1e-8;
constexpr long kMaxIterations = 1000000;

Vector regularized_gradient(const Problem& p, const Vector& lambda_star, double eps, const Vector& x) {
    Vector g = grad_x_aug_lagrangian(p, x, lambda_star);
    g += eps * x;
    return g;
}

Vector solve_quadratic(const Problem& p, const QuadraticObjective& qf, const Vector& lambda_star, double eps) {
    const Matrix& A = p.constraint().A();
    const Vector& b = p.constraint().b();
    const Eigen::Index n = p.n();
    Matrix H = qf.Q;
    H.noalias() += p.rho() * A.transpose() * A;
    H.diagonal().array() += eps;
    const Vector rhs = -(qf.q + A.transpose() * lambda_star - p.rho() * A.transpose() * b);

    const Eigen::LLT<Matrix> llt(H);
    if (llt.info() != Eigen::Success) throw std::runtime_error("tikhonov_point: regularized Hessian is not positive definite");
    Vector x = llt.solve(rhs);
    const Vector r = rhs - H * x;
    x += llt.solve(r);
    if (x.size() != n || !x.allFinite()) throw NonFiniteError("tikhonov_point: linear solve produced non-finite values");
    return x;
}

Vector solve_callback(const Problem& p, const Vector& lambda_star, double eps) {
    const auto L = p.objective().lipschitz_bound();
    if (!L) throw std::invalid_argument("tikhonov_point: callback objective needs a Lipschitz bound");
    const double norm_a = p.constraint().operator_norm();
    const double step = 1.0 / (*L + p.rho() * norm_a * norm_a + eps);
    Vector x = Vector::Zero(p.n());
    for (long it = 0; it < kMaxIterations; ++it) {
        const Vector g = regularized_gradient(p, lambda_star, eps, x);
        if (g.norm() <= kResidualTol) return x;
        x -= step * g;
    }
    std::ostringstream os;
    os << "tikhonov_point: gradient descent did not converge in " << kMaxIterations << " iterations (eps = " << eps << ")";
    throw std::runtime_error(os.str());
}

}  // namespace

PathPoint tikhonov_point(const Problem& p, const Vector& lambda_star, double eps) {
    require_size(lambda_star, p.m(), "lambda*");
    if (!(eps >= kMinEps) || !std::isfinite(eps)) {
        throw std::invalid_argument("tikhonov_point: eps must be finite and at least 1e-12");
    }
    PathPoint pt;
    pt.eps = eps;
    if (const auto qf = p.objective().quadratic_form()) {
        pt.x_eps = solve_quadratic(p, *qf, lambda_star, eps);
    } else {
        pt.x_eps = solve_callback(p, lambda_star, eps);
    }
    pt.norm = pt.x_eps.norm();
    pt.residual = regularized_gradient(p, lambda_star, eps, pt.x_eps).norm();
    return pt;
}

std::vector<PathPoint> path_scan(const Problem& p, const Vector& lambda_star, const std::vector<double>& eps_grid) {
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0)) throw std::invalid_argument("path_scan: eps values must be positive");
        if (i > 0 && !(eps_grid[i] < eps_grid[i - 1])) throw std::invalid_argument("path_scan: eps grid must be strictly decreasing");
    }
    std::vector<PathPoint> out;
    out.reserve(eps_grid.size());
    for (double e : eps_grid) out.push_back(tikhonov_point(p, lambda_star, e));
    return out;
}

}  // namespace pdflow
