#include "pdflow/problem.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace pdflow {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-10;
constexpr double kSaddleStationarityTol = 1e-8;
constexpr double kSaddleFeasibilityTol = 1e-10;
constexpr double kKktTol = 1e-8;

double spectral_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues()(0);
}

void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) throw NonFiniteError(std::string(what) + " contains non-finite values");
}

}  // namespace

LinearConstraint::LinearConstraint(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
    if (A_.rows() < 1 || A_.cols() < 1) throw DimensionError("constraint matrix must be at least 1x1");
    if (b_.size() != A_.rows()) {
        throw DimensionError("constraint: A has " + std::to_string(A_.rows()) + " rows but b has length " +
                             std::to_string(b_.size()));
    }
    if (!A_.allFinite() || !b_.allFinite()) throw NonFiniteError("constraint data is not finite");
    if ((A_.array() == 0.0).all()) throw std::invalid_argument("constraint matrix A is identically zero");
    operator_norm_ = spectral_norm(A_);
}

ConvexObjective ConvexObjective::quadratic(Matrix Q, Vector q) {
    if (Q.rows() != Q.cols()) throw DimensionError("quadratic objective: Q must be square");
    if (q.size() != Q.rows()) throw DimensionError("quadratic objective: q length does not match Q");
    if (Q.rows() < 1) throw DimensionError("quadratic objective: empty Q");
    if (!Q.allFinite() || !q.allFinite()) throw NonFiniteError("quadratic objective data is not finite");

    const double qnorm = Q.norm();
    if ((Q - Q.transpose()).norm() > kSymmetryTol * std::max(1.0, qnorm)) {
        throw std::invalid_argument("quadratic objective: Q is not symmetric");
    }
    Matrix sym = 0.5 * (Q + Q.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    if (lmin < -kPsdTol * qnorm) {
        std::ostringstream os;
        os << "quadratic objective: Q is not positive semidefinite (smallest eigenvalue " << lmin << ")";
        throw std::invalid_argument(os.str());
    }
    return ConvexObjective(QuadraticObjective{std::move(sym), std::move(q)});
}

ConvexObjective ConvexObjective::rank_one_squared(Vector c) {
    if (c.size() < 1) throw DimensionError("rank-one objective: empty c");
    if (!c.allFinite()) throw NonFiniteError("rank-one objective: c is not finite");
    return ConvexObjective(RankOneSquaredObjective{std::move(c)});
}

ConvexObjective ConvexObjective::callback(CallbackObjective cb) {
    if (cb.dimension < 1) throw DimensionError("callback objective: dimension must be positive");
    if (!cb.value || !cb.gradient) throw std::invalid_argument("callback objective: value and gradient are required");
    if (cb.lipschitz && !(*cb.lipschitz > 0.0)) throw std::invalid_argument("callback objective: Lipschitz bound must be positive");
    return ConvexObjective(std::move(cb));
}

Eigen::Index ConvexObjective::dimension() const {
    return std::visit(
        [](const auto& v) -> Eigen::Index {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, QuadraticObjective>) return v.Q.rows();
            else if constexpr (std::is_same_v<T, RankOneSquaredObjective>) return v.c.size();
            else return v.dimension;
        },
        variant_);
}

double ConvexObjective::value(const Vector& x) const {
    require_size(x, dimension(), "objective value");
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, QuadraticObjective>) {
                return 0.5 * x.dot(v.Q * x) + v.q.dot(x);
            } else if constexpr (std::is_same_v<T, RankOneSquaredObjective>) {
                const double s = v.c.dot(x);
                return s * s;
            } else {
                const double f = v.value(x);
                if (!std::isfinite(f)) throw NonFiniteError("callback objective returned a non-finite value");
                return f;
            }
        },
        variant_);
}

void ConvexObjective::gradient(const Vector& x, Vector& out) const {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, QuadraticObjective>) {
                out.noalias() = v.Q * x;
                out += v.q;
            } else if constexpr (std::is_same_v<T, RankOneSquaredObjective>) {
                out = (2.0 * v.c.dot(x)) * v.c;
            } else {
                v.gradient(x, out);
                if (out.size() != v.dimension) throw DimensionError("callback gradient returned wrong length");
                if (!out.allFinite()) throw NonFiniteError("callback gradient returned non-finite values");
            }
        },
        variant_);
}

std::optional<QuadraticObjective> ConvexObjective::quadratic_form() const {
    if (const auto* q = std::get_if<QuadraticObjective>(&variant_)) return *q;
    if (const auto* r = std::get_if<RankOneSquaredObjective>(&variant_)) {
        return QuadraticObjective{2.0 * r->c * r->c.transpose(), Vector::Zero(r->c.size())};
    }
    return std::nullopt;
}

std::optional<double> ConvexObjective::lipschitz_bound() const {
    if (const auto* cb = std::get_if<CallbackObjective>(&variant_)) return cb->lipschitz;
    if (const auto* r = std::get_if<RankOneSquaredObjective>(&variant_)) return 2.0 * r->c.squaredNorm();
    return spectral_norm(std::get<QuadraticObjective>(variant_).Q);
}

Problem::Problem(ConvexObjective objective, LinearConstraint constraint, double rho,
                 std::optional<SaddlePoint> known_saddle)
    : objective_(std::move(objective)), constraint_(std::move(constraint)), rho_(rho) {
    if (objective_.dimension() != constraint_.cols()) {
        throw DimensionError("problem: objective dimension " + std::to_string(objective_.dimension()) +
                             " does not match constraint columns " + std::to_string(constraint_.cols()));
    }
    if (!(rho_ >= 0.0) || !std::isfinite(rho_)) throw std::invalid_argument("problem: rho must be finite and >= 0");
    if (known_saddle) *this = with_saddle(std::move(*known_saddle));
}

Problem Problem::with_saddle(SaddlePoint saddle) const {
    require_size(saddle.x, n(), "saddle x");
    require_size(saddle.lambda, m(), "saddle lambda");
    require_finite(saddle.x, "saddle x");
    require_finite(saddle.lambda, "saddle lambda");

    Vector g(n());
    objective_.gradient(saddle.x, g);
    const double stat = (g + constraint_.A().transpose() * saddle.lambda).norm();
    const double feas = (constraint_.A() * saddle.x - constraint_.b()).norm();
    if (stat > kSaddleStationarityTol || feas > kSaddleFeasibilityTol) {
        std::ostringstream os;
        os << "saddle point rejected: stationarity residual " << stat << ", feasibility residual " << feas;
        throw std::invalid_argument(os.str());
    }
    Problem copy = *this;
    copy.known_saddle_ = std::move(saddle);
    return copy;
}

Problem make_toy_problem(double m, double n, double e, double rho) {
    if (m == 0.0 || n == 0.0 || e == 0.0) throw std::invalid_argument("toy problem: m, n, e must be nonzero");
    Vector c(3);
    c << m, n, e;
    Matrix A(1, 3);
    A << m, -n, e;
    return Problem(ConvexObjective::rank_one_squared(c), LinearConstraint(A, Vector::Zero(1)), rho,
                   SaddlePoint{Vector::Zero(3), Vector::Zero(1)});
}

Vector objective_gradient(const Problem& p, const Vector& x) {
    require_size(x, p.n(), "objective_gradient x");
    Vector g(p.n());
    p.objective().gradient(x, g);
    return g;
}

Vector grad_x_aug_lagrangian(const Problem& p, const Vector& x, const Vector& lambda) {
    require_size(x, p.n(), "grad_x_aug_lagrangian x");
    require_size(lambda, p.m(), "grad_x_aug_lagrangian lambda");
    const auto& A = p.constraint().A();
    const Vector residual = A * x - p.constraint().b();
    return objective_gradient(p, x) + A.transpose() * lambda + p.rho() * (A.transpose() * residual);
}

double aug_lagrangian_value(const Problem& p, const Vector& x, const Vector& lambda) {
    require_size(x, p.n(), "aug_lagrangian_value x");
    require_size(lambda, p.m(), "aug_lagrangian_value lambda");
    const Vector residual = p.constraint().A() * x - p.constraint().b();
    return p.objective().value(x) + lambda.dot(residual) + 0.5 * p.rho() * residual.squaredNorm();
}

double feasibility(const Problem& p, const Vector& x) {
    require_size(x, p.n(), "feasibility x");
    return (p.constraint().A() * x - p.constraint().b()).norm();
}

double primal_dual_gap(const Problem& p, const Vector& x) {
    if (!p.known_saddle()) throw std::logic_error("primal_dual_gap: problem has no known saddle point");
    const auto& s = *p.known_saddle();
    return aug_lagrangian_value(p, x, s.lambda) - aug_lagrangian_value(p, s.x, s.lambda);
}

SaddlePoint minimum_norm_solution(const Problem& p) {
    auto form = p.objective().quadratic_form();
    if (!form) throw std::invalid_argument("minimum_norm_solution: callback objectives need a user-supplied saddle point");
    const Eigen::Index n = p.n();
    const Eigen::Index m = p.m();
    if (n > 2000 || m > 2000) throw std::invalid_argument("minimum_norm_solution: problem too large for dense oracle");
    const Matrix& A = p.constraint().A();
    const Vector& b = p.constraint().b();

    // KKT: [Q A'; A 0] [x; lambda] = [-q; b]. Its solution set is affine and
    // its projection onto x is the solution set S of the program.
    Matrix K = Matrix::Zero(n + m, n + m);
    K.topLeftCorner(n, n) = form->Q;
    K.topRightCorner(n, m) = A.transpose();
    K.bottomLeftCorner(m, n) = A;
    Vector rhs(n + m);
    rhs << -form->q, b;

    Eigen::BDCSVD<Matrix> svd(K, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double thresh = std::max(1.0, smax) * static_cast<double>(n + m) * Eigen::NumTraits<double>::epsilon() * 16.0;
    svd.setThreshold(thresh / std::max(smax, 1e-300));
    const Vector w0 = svd.solve(rhs);
    const double kkt_residual = (K * w0 - rhs).norm();
    if (kkt_residual > kKktTol * std::max(1.0, rhs.norm() + smax * w0.norm())) {
        throw std::runtime_error("minimum_norm_solution: KKT system is inconsistent (infeasible, or objective unbounded below on the feasible set)");
    }

    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > thresh) ++rank;
    }
    Vector x = w0.head(n);
    if (rank < n + m) {
        const Matrix null_x = svd.matrixV().rightCols(n + m - rank).topRows(n);
        // null vectors are orthonormal, so an absolute cutoff is meaningful; a
        // relative one would promote round-off in multiplier-only directions
        Eigen::JacobiSVD<Matrix> nsvd(null_x, Eigen::ComputeThinU);
        Eigen::Index r = 0;
        while (r < nsvd.singularValues().size() && nsvd.singularValues()(r) > 1e-10) ++r;
        if (r > 0) {
            const Matrix basis = nsvd.matrixU().leftCols(r);
            x -= basis * (basis.transpose() * x);
        }
    }

    // grad f is constant on S for convex quadratics, so the dual solution set
    // is {lambda : A' lambda = -grad f(x*)}; take its least-norm element.
    const Vector grad = form->Q * x + form->q;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A.transpose());
    Vector lambda = cod.solve(-grad);

    const double stat = (grad + A.transpose() * lambda).norm();
    const double feas = (A * x - b).norm();
    const double scale = std::max(1.0, grad.norm() + b.norm());
    if (stat > kKktTol * scale || feas > kKktTol * scale) {
        std::ostringstream os;
        os << "minimum_norm_solution: KKT check failed (stationarity " << stat << ", feasibility " << feas << ")";
        throw std::runtime_error(os.str());
    }
    return SaddlePoint{std::move(x), std::move(lambda)};
}

SaddlePoint resolve_saddle(const Problem& p) {
    if (p.known_saddle()) return *p.known_saddle();
    return minimum_norm_solution(p);
}

}  // namespace pdflow
