#include "pdflow/dynamics.hpp"

#include <sstream>
#include <stdexcept>
#include <string>

namespace pdflow {

std::string_view to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::IHD: return "ihd";
        case SystemKind::IHDTR: return "ihdtr";
        case SystemKind::Baseline: return "baseline";
    }
    return "unknown";
}

SystemKind system_from_string(std::string_view name) {
    if (name == "ihd") return SystemKind::IHD;
    if (name == "ihdtr") return SystemKind::IHDTR;
    if (name == "baseline") return SystemKind::Baseline;
    throw std::invalid_argument("unknown system '" + std::string(name) + "' (expected ihd, ihdtr or baseline)");
}

Vector PhaseVector::pack() const {
    const Eigen::Index n = x.size(), m = lambda.size();
    require_size(vx, n, "phase vector vx");
    require_size(vlambda, m, "phase vector vlambda");
    Vector z(2 * (n + m));
    z << x, lambda, vx, vlambda;
    return z;
}

PhaseVector PhaseVector::unpack(const Vector& z, Eigen::Index n, Eigen::Index m) {
    require_size(z, 2 * (n + m), "packed phase vector");
    return PhaseVector{z.segment(0, n), z.segment(n, m), z.segment(n + m, n), z.segment(2 * n + m, m)};
}

bool PhaseVector::all_finite() const {
    return x.allFinite() && lambda.allFinite() && vx.allFinite() && vlambda.allFinite();
}

namespace {

void require_time(const CoefficientSchedule& s, double t) {
    if (!(t >= s.t0)) {
        std::ostringstream os;
        os << "time " << t << " precedes t0 = " << s.t0;
        throw std::domain_error(os.str());
    }
}

}  // namespace

std::pair<double, double> beta_of_t(const CoefficientSchedule& s, double t) {
    require_time(s, t);
    return {s.gamma + s.beta_shift / t, -s.beta_shift / (t * t)};
}

double eta_of_t(const CoefficientSchedule& s, double t) {
    const auto [beta, beta_dot] = beta_of_t(s, t);
    return (-s.alpha * beta + 3.0 * t * beta_dot) / (2.0 * s.alpha);
}

ExtrapolatedPoints extrapolated_points(const CoefficientSchedule& s, double t, const PhaseVector& z) {
    const double beta = beta_of_t(s, t).first;
    const double theta = 3.0 * t / (2.0 * s.alpha);
    return {z.x + beta * z.vx, z.x + theta * z.vx, z.lambda + theta * z.vlambda};
}

CoefficientSchedule effective_schedule(const CoefficientSchedule& s, SystemKind kind) {
    CoefficientSchedule e = s;
    if (kind != SystemKind::IHDTR) e.eps = TikhonovFamily::zero();
    if (kind == SystemKind::Baseline) {
        e.gamma = 0.0;
        e.beta_shift = 0.0;
    }
    return e;
}

PrimalDualField::PrimalDualField(Problem problem, CoefficientSchedule schedule, SystemKind kind)
    : problem_(std::move(problem)), schedule_(effective_schedule(schedule, kind)), kind_(kind) {
    schedule_.validate();
    const Eigen::Index n = problem_.n(), m = problem_.m();
    x_hat_.resize(n);
    grad_f_.resize(n);
    g_.resize(n);
    ax_.resize(m);
    av_.resize(m);
    r_hat_.resize(m);
    mult_.resize(m);
    ag_.resize(m);
}

void PrimalDualField::operator()(double t, const Vector& z, Vector& dz) {
    const Eigen::Index n = problem_.n(), m = problem_.m();
    require_size(z, 2 * (n + m), "field state");
    if (!z.allFinite()) throw NonFiniteError("field state is not finite");
    require_time(schedule_, t);
    dz.resize(z.size());

    // A has a handful of rows; coefficient-wise products avoid gemv dispatch
    const auto x = z.segment(0, n);
    const auto lambda = z.segment(n, m);
    const auto vx = z.segment(n + m, n);
    const auto vlambda = z.segment(2 * n + m, m);

    const CoefficientSchedule& s = schedule_;
    const double beta = s.gamma + s.beta_shift / t;
    const double beta_dot = -s.beta_shift / (t * t);
    const double eta = (-s.alpha * beta + 3.0 * t * beta_dot) / (2.0 * s.alpha);
    const double theta = 3.0 * t / (2.0 * s.alpha);
    const double xi = s.xi.value(t);
    const double eps = s.eps.is_zero() ? 0.0 : s.eps.value(t);
    const double friction = s.alpha / t;

    const Matrix& A = problem_.constraint().A();
    const Vector& b = problem_.constraint().b();

    x_hat_ = x + beta * vx;
    ax_.noalias() = A.lazyProduct(x);
    ax_ -= b;
    av_.noalias() = A.lazyProduct(vx);
    r_hat_ = ax_ + beta * av_;  // A x_hat - b

    // g = grad_x L_rho(x_hat, lambda_bar) + eps x
    problem_.objective().gradient(x_hat_, grad_f_);
    mult_ = lambda + theta * vlambda + problem_.rho() * r_hat_;
    g_ = grad_f_;
    g_.noalias() += A.transpose().lazyProduct(mult_);
    if (eps != 0.0) g_ += eps * x;
    ag_.noalias() = A.lazyProduct(g_);

    dz.segment(0, n) = vx;
    dz.segment(n, m) = vlambda;
    dz.segment(n + m, n) = -friction * vx - xi * g_;
    // A x_bar - b = (A x - b) + theta A x'
    dz.segment(2 * n + m, m) =
        -friction * vlambda + xi * (ax_ + theta * av_ + eta * av_ - (theta * xi * beta) * ag_);
}

PhaseVector rhs(const CoefficientSchedule& s, const Problem& p, SystemKind kind, double t, const PhaseVector& z) {
    PrimalDualField field(p, s, kind);
    Vector dz(field.state_size());
    field(t, z.pack(), dz);
    return PhaseVector::unpack(dz, p.n(), p.m());
}

}  // namespace pdflow
