#include "pdflow/dynamics.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace pdflow;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

CoefficientSchedule paper_schedule(bool with_eps) {
    CoefficientSchedule s;
    s.alpha = 3.1;
    s.gamma = 1.0;
    s.beta_shift = -0.5;
    s.xi = ScalingFamily::constant();
    s.eps = with_eps ? TikhonovFamily::inverse_power(1.0, 1.5) : TikhonovFamily::zero();
    return s;
}

PhaseVector toy_start() { return {vec({1, -1, -1}), vec({1}), vec({-1, 1, 1}), vec({-1})}; }

}  // namespace

TEST(Coefficients, BetaAndDerivative) {
    const auto [b, bd] = beta_of_t(paper_schedule(false), 1.0);
    EXPECT_DOUBLE_EQ(b, 0.5);
    EXPECT_DOUBLE_EQ(bd, 0.5);

    CoefficientSchedule zero = paper_schedule(false);
    zero.gamma = 0.0;
    zero.beta_shift = 0.0;
    for (double t : {1.0, 7.0, 1e5}) {
        EXPECT_EQ(beta_of_t(zero, t).first, 0.0);
        EXPECT_EQ(beta_of_t(zero, t).second, 0.0);
        EXPECT_EQ(eta_of_t(zero, t), 0.0);
    }
    EXPECT_NEAR(beta_of_t(paper_schedule(false), 1e9).first, 1.0, 1e-9);
}

TEST(Coefficients, EtaClosedFormAndLimit) {
    const CoefficientSchedule s = paper_schedule(false);
    EXPECT_NEAR(eta_of_t(s, 1.0), -0.5 + 3.05 / 6.2, 1e-15);
    EXPECT_NEAR(eta_of_t(s, 1.0), -0.00806451612903, 1e-13);
    EXPECT_NEAR(eta_of_t(s, 1e9), -0.5, 1e-8);

    // eta from a finite-difference beta'
    const double t = 2.5, h = 1e-6;
    const double bd = (beta_of_t(s, t + h).first - beta_of_t(s, t - h).first) / (2 * h);
    EXPECT_NEAR(eta_of_t(s, t), (-s.alpha * beta_of_t(s, t).first + 3 * t * bd) / (2 * s.alpha), 1e-9);
}

TEST(Coefficients, RejectsTimeBeforeStart) {
    const CoefficientSchedule s = paper_schedule(false);
    EXPECT_THROW(beta_of_t(s, 0.5), std::domain_error);
    EXPECT_THROW(rhs(s, make_toy_problem(5, 10, 6, 1), SystemKind::IHD, 0.5, toy_start()), std::domain_error);
}

TEST(Extrapolation, ZeroVelocityLeavesPointsUnchanged) {
    PhaseVector z = toy_start();
    z.vx.setZero();
    z.vlambda.setZero();
    const ExtrapolatedPoints e = extrapolated_points(paper_schedule(false), 3.0, z);
    EXPECT_EQ(e.x_hat, z.x);
    EXPECT_EQ(e.x_bar, z.x);
    EXPECT_EQ(e.lambda_bar, z.lambda);
}

TEST(Extrapolation, UnitCoefficients) {
    CoefficientSchedule s;
    s.alpha = 3.0;
    s.gamma = 1.0;
    s.beta_shift = 0.0;
    const PhaseVector z{Vector::Zero(3), Vector::Zero(1), vec({1, 0, 0}), Vector::Zero(1)};
    const ExtrapolatedPoints e = extrapolated_points(s, 2.0, z);
    EXPECT_EQ(e.x_hat, vec({1, 0, 0}));
    EXPECT_EQ(e.x_bar, vec({1, 0, 0}));
}

TEST(Extrapolation, ToyStart) {
    const ExtrapolatedPoints e = extrapolated_points(paper_schedule(false), 1.0, toy_start());
    EXPECT_EQ(e.x_hat, vec({0.5, -0.5, -0.5}));
}

TEST(Field, StationaryAtSaddle) {
    const Problem p = make_toy_problem(5, 10, 6, 1.0);
    const PhaseVector z{Vector::Zero(3), Vector::Zero(1), Vector::Zero(3), Vector::Zero(1)};
    for (SystemKind kind : {SystemKind::IHD, SystemKind::IHDTR, SystemKind::Baseline}) {
        const PhaseVector d = rhs(paper_schedule(true), p, kind, 2.0, z);
        EXPECT_EQ(d.pack().norm(), 0.0) << to_string(kind);
    }
}

TEST(Field, TikhonovTermIsOnlyForceAtNonzeroSaddle) {
    Matrix A(1, 2);
    A << 1, 1;
    Vector b(1);
    b << 2;
    const Problem p(ConvexObjective::quadratic(Matrix::Identity(2, 2), Vector::Zero(2)), LinearConstraint(A, b), 1.0);
    const SaddlePoint sp = minimum_norm_solution(p);
    const PhaseVector z{sp.x, sp.lambda, Vector::Zero(2), Vector::Zero(1)};
    const CoefficientSchedule s = paper_schedule(true);
    const double t = 4.0;

    EXPECT_LT(rhs(s, p, SystemKind::IHD, t, z).pack().norm(), 1e-14);
    const PhaseVector d = rhs(s, p, SystemKind::IHDTR, t, z);
    const Vector expected = -s.xi.value(t) * s.eps.value(t) * sp.x;
    EXPECT_NEAR((d.vx - expected).norm(), 0.0, 1e-14);
    EXPECT_GT(d.vx.norm(), 0.0);
}

TEST(Field, ToyStartMatchesTermByTermReference) {
    const Problem p = make_toy_problem(5, 10, 6, 1.0);
    for (bool eps : {false, true}) {
        const SystemKind kind = eps ? SystemKind::IHDTR : SystemKind::IHD;
        const PhaseVector got = rhs(paper_schedule(true), p, kind, 1.0, toy_start());
        const PhaseVector want = oracle::reference_field(paper_schedule(true), p, eps, 1.0, toy_start());
        EXPECT_TRUE(got.all_finite());
        EXPECT_LT((got.pack() - want.pack()).norm(), 1e-12 * want.pack().norm()) << to_string(kind);
    }
}

TEST(Field, PackedEvaluatorAgreesWithPhaseVersion) {
    const Problem p = make_toy_problem(5, 10, 6, 1.0);
    for (SystemKind kind : {SystemKind::IHD, SystemKind::IHDTR, SystemKind::Baseline}) {
        PrimalDualField f(p, paper_schedule(true), kind);
        Vector dz(f.state_size());
        for (double t : {1.0, 3.3, 40.0}) {
            f(t, toy_start().pack(), dz);
            EXPECT_EQ(dz, rhs(paper_schedule(true), p, kind, t, toy_start()).pack());
        }
    }
}

TEST(Field, RejectsNonFiniteState) {
    PhaseVector z = toy_start();
    z.vx[1] = std::numeric_limits<double>::infinity();
    EXPECT_THROW(rhs(paper_schedule(false), make_toy_problem(5, 10, 6, 1), SystemKind::IHD, 1.0, z), NonFiniteError);
}

TEST(Field, RejectsWrongStateLength) {
    PrimalDualField f(make_toy_problem(5, 10, 6, 1), paper_schedule(false), SystemKind::IHD);
    Vector dz(8);
    EXPECT_THROW(f(1.0, Vector::Zero(7), dz), DimensionError);
}

TEST(Field, EffectiveScheduleOfEachSystem) {
    const CoefficientSchedule s = paper_schedule(true);
    EXPECT_FALSE(effective_schedule(s, SystemKind::IHDTR).eps.is_zero());
    EXPECT_TRUE(effective_schedule(s, SystemKind::IHD).eps.is_zero());
    EXPECT_EQ(effective_schedule(s, SystemKind::IHD).gamma, 1.0);
    const CoefficientSchedule base = effective_schedule(s, SystemKind::Baseline);
    EXPECT_TRUE(base.eps.is_zero());
    EXPECT_EQ(base.gamma, 0.0);
    EXPECT_EQ(base.beta_shift, 0.0);
}

TEST(PhaseVectorLayout, PackUnpackRoundTrip) {
    const PhaseVector z = toy_start();
    const Vector packed = z.pack();
    EXPECT_EQ(packed, vec({1, -1, -1, 1, -1, 1, 1, -1}));
    const PhaseVector back = PhaseVector::unpack(packed, 3, 1);
    EXPECT_EQ(back.pack(), packed);
    EXPECT_THROW(PhaseVector::unpack(packed, 3, 2), DimensionError);
}

TEST(SystemNames, RoundTrip) {
    for (SystemKind k : {SystemKind::IHD, SystemKind::IHDTR, SystemKind::Baseline}) {
        EXPECT_EQ(system_from_string(to_string(k)), k);
    }
    EXPECT_THROW(system_from_string("pd-avd"), std::invalid_argument);
}
