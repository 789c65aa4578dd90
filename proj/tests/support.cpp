#include "support.hpp"

#include "pdflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pdflow::oracle {

PhaseVector reference_field(const CoefficientSchedule& s, const Problem& p, bool with_tikhonov, double t,
                            const PhaseVector& z) {
    const Matrix A = p.constraint().A();
    const Vector b = p.constraint().b();
    const double beta = s.gamma + s.beta_shift / t;
    const double beta_dot = -s.beta_shift / (t * t);
    const double eta = (-s.alpha * beta + 3.0 * t * beta_dot) / (2.0 * s.alpha);
    const double theta = 3.0 * t / (2.0 * s.alpha);
    const double xi = s.xi.value(t);
    const double eps = with_tikhonov ? s.eps.value(t) : 0.0;

    const Vector x_hat = z.x + beta * z.vx;
    const Vector x_bar = z.x + theta * z.vx;
    const Vector lambda_bar = z.lambda + theta * z.vlambda;

    Vector grad_f(p.n());
    p.objective().gradient(x_hat, grad_f);
    const Vector grad_L = grad_f + A.transpose() * lambda_bar + p.rho() * A.transpose() * (A * x_hat - b);
    const Vector g = grad_L + eps * z.x;

    PhaseVector d;
    d.x = z.vx;
    d.lambda = z.vlambda;
    d.vx = -(s.alpha / t) * z.vx - xi * g;
    d.vlambda = -(s.alpha / t) * z.vlambda + xi * ((A * x_bar - b) + eta * (A * z.vx) - theta * xi * beta * (A * g));
    return d;
}

Vector numeric_lagrangian_gradient(const Problem& p, const Vector& x, const Vector& lambda, double h) {
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vector xp = x, xm = x;
        const double step = h * std::max(1.0, std::abs(x[i]));
        xp[i] += step;
        xm[i] -= step;
        g[i] = (aug_lagrangian_value(p, xp, lambda) - aug_lagrangian_value(p, xm, lambda)) / (2.0 * step);
    }
    return g;
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng, -scale, scale);
    return v;
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    Matrix M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) M(i, j) = uniform(rng, -1.0, 1.0);
    return M;
}

double rel(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

PhaseVector random_state(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m) {
    return PhaseVector{random_vector(rng, n), random_vector(rng, m), random_vector(rng, n), random_vector(rng, m)};
}

RandomInstance random_instance(std::mt19937_64& rng) {
    const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(2, 6)(rng);
    const Eigen::Index m = std::uniform_int_distribution<Eigen::Index>(1, n - 1)(rng);

    // well conditioned full row rank
    Matrix A = random_matrix(rng, m, n);
    for (Eigen::Index i = 0; i < m; ++i) A(i, i) += 2.0;
    const Vector b = random_vector(rng, m);

    ConvexObjective obj = [&] {
        if (std::bernoulli_distribution(0.5)(rng)) {
            const Matrix B = random_matrix(rng, n, n);
            return ConvexObjective::quadratic(B * B.transpose() + 0.1 * Matrix::Identity(n, n), random_vector(rng, n));
        }
        return ConvexObjective::rank_one_squared(random_vector(rng, n));
    }();
    Problem base(std::move(obj), LinearConstraint(A, b), uniform(rng, 0.0, 2.0));
    const SaddlePoint saddle = minimum_norm_solution(base);

    CoefficientSchedule s;
    s.alpha = uniform(rng, 3.2, 8.0);
    s.gamma = uniform(rng, 0.1, 2.0);
    s.beta_shift = uniform(rng, -1.0, 1.0);
    s.xi = ScalingFamily::power_law(uniform(rng, 0.5, 2.0), uniform(rng, -0.5, 1.0));
    s.eps = TikhonovFamily::inverse_power(uniform(rng, 0.1, 2.0), uniform(rng, 0.5, 3.0));
    s.t0 = 1.0;
    s.validate();

    RandomInstance inst{base.with_saddle(saddle), s, saddle, random_state(rng, n, m), uniform(rng, 1.0, 5.0)};
    return inst;
}

ConsistencyReport run_consistency_suite(int count, unsigned long seed) {
    std::mt19937_64 rng(seed);
    ConsistencyReport rep;
    rep.instances = count;

    for (int k = 0; k < count; ++k) {
        const RandomInstance inst = random_instance(rng);
        const Problem& p = inst.problem;
        const CoefficientSchedule& s = inst.schedule;
        const double t = inst.t;
        std::vector<std::string> bad;

        // gradient of the augmented Lagrangian against central differences
        const double e_grad = rel(grad_x_aug_lagrangian(p, inst.state.x, inst.state.lambda),
                                  numeric_lagrangian_gradient(p, inst.state.x, inst.state.lambda));
        rep.worst_gradient = std::max(rep.worst_gradient, e_grad);
        if (e_grad > 1e-6) bad.push_back("gradient mismatch " + std::to_string(e_grad));

        // field against the term-by-term reference, all three systems
        double e_field = 0.0;
        for (SystemKind kind : {SystemKind::IHD, SystemKind::IHDTR, SystemKind::Baseline}) {
            const CoefficientSchedule eff = effective_schedule(s, kind);
            const PhaseVector got = rhs(s, p, kind, t, inst.state);
            const PhaseVector want = reference_field(eff, p, kind == SystemKind::IHDTR, t, inst.state);
            e_field = std::max(e_field, rel(got.pack(), want.pack()));

            PrimalDualField field(p, s, kind);
            Vector dz(field.state_size());
            field(t, inst.state.pack(), dz);
            e_field = std::max(e_field, rel(dz, want.pack()));
        }
        rep.worst_field = std::max(rep.worst_field, e_field);
        if (e_field > 1e-10) bad.push_back("field mismatch " + std::to_string(e_field));

        // Tikhonov flow with eps = 0 is the implicit Hessian damping flow
        CoefficientSchedule no_eps = s;
        no_eps.eps = TikhonovFamily::zero();
        const double e_red =
            (rhs(no_eps, p, SystemKind::IHDTR, t, inst.state).pack() - rhs(s, p, SystemKind::IHD, t, inst.state).pack())
                .lpNorm<Eigen::Infinity>();
        rep.worst_reduction = std::max(rep.worst_reduction, e_red);
        if (e_red != 0.0) bad.push_back("reduction mismatch " + std::to_string(e_red));

        // stationarity: grad L_rho and the IHD field vanish at (x*, lambda*, 0, 0)
        const Eigen::Index n = p.n(), m = p.m();
        const PhaseVector at_saddle{inst.saddle.x, inst.saddle.lambda, Vector::Zero(n), Vector::Zero(m)};
        const double scale = 1.0 + inst.saddle.x.norm() + inst.saddle.lambda.norm();
        const double e_stat = std::max(grad_x_aug_lagrangian(p, inst.saddle.x, inst.saddle.lambda).norm(),
                                       std::max(feasibility(p, inst.saddle.x),
                                                rhs(s, p, SystemKind::IHD, t, at_saddle).pack().norm())) /
                              scale;
        rep.worst_stationarity = std::max(rep.worst_stationarity, e_stat);
        if (e_stat > 1e-9) bad.push_back("stationarity residual " + std::to_string(e_stat));

        // energy derivative along the flow against a central difference
        double e_energy = 0.0;
        for (SystemKind kind : {SystemKind::IHD, SystemKind::IHDTR}) {
            const EnergyParams params{inst.saddle.lambda, inst.saddle.x, effective_schedule(s, kind)};
            const PhaseVector zdot = rhs(s, p, kind, t, inst.state);
            const double analytic = energy_eps_derivative_analytic(params, p, t, inst.state, zdot);
            const double h = 1e-5 * t;
            auto shifted = [&](double sign) {
                const Vector zz = inst.state.pack() + sign * h * zdot.pack();
                return energy_E_eps(params, p, t + sign * h, PhaseVector::unpack(zz, n, m));
            };
            const double fd = (shifted(1.0) - shifted(-1.0)) / (2.0 * h);
            const double E = energy_E_eps(params, p, t, inst.state);
            e_energy = std::max(e_energy, std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-3 * (1.0 + E)));
        }
        rep.worst_energy_rate = std::max(rep.worst_energy_rate, e_energy);
        if (e_energy > 1e-4) bad.push_back("energy rate mismatch " + std::to_string(e_energy));

        if (!bad.empty()) {
            ++rep.failed;
            std::ostringstream os;
            os << "instance " << k << " (n=" << n << ", m=" << m << "):";
            for (const std::string& b : bad) os << " " << b << ";";
            rep.failures.push_back(os.str());
        }
    }
    return rep;
}

}  // namespace pdflow::oracle
