#pragma once

// Shared by the unit tests and the acceptance runner: an independent
// re-derivation of the vector field, random problem instances, and the
// randomized consistency suite.

#include "pdflow/dynamics.hpp"
#include "pdflow/problem.hpp"
#include "pdflow/schedule.hpp"

#include <random>
#include <string>
#include <vector>

namespace pdflow::oracle {

/// x'' and lambda'' written out term by term from the second-order system,
/// using only dense products and the objective's own gradient.
PhaseVector reference_field(const CoefficientSchedule& s, const Problem& p, bool with_tikhonov, double t,
                            const PhaseVector& z);

/// Central difference of L_rho(., lambda) with step h.
Vector numeric_lagrangian_gradient(const Problem& p, const Vector& x, const Vector& lambda, double h = 1e-6);

struct RandomInstance {
    Problem problem;
    CoefficientSchedule schedule;  ///< carries a Tikhonov term a / t^r
    SaddlePoint saddle;
    PhaseVector state;
    double t = 1.0;
};

/// Quadratic (positive definite Q) or rank-one squared objective, full row
/// rank A, and a schedule satisfying every validation rule.
RandomInstance random_instance(std::mt19937_64& rng);

PhaseVector random_state(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m);

struct ConsistencyReport {
    int instances = 0;
    int failed = 0;
    double worst_gradient = 0.0;       ///< relative FD mismatch of grad_x L_rho
    double worst_field = 0.0;          ///< relative mismatch against reference_field
    double worst_reduction = 0.0;      ///< |IHDTR with eps = 0 - IHD|, exact expected
    double worst_stationarity = 0.0;   ///< field and grad L_rho at the saddle
    double worst_energy_rate = 0.0;    ///< relative FD mismatch of dE/dt along the flow
    std::vector<std::string> failures;
};

/// Finite-difference, reduction and stationarity checks on `count` random
/// instances drawn from `seed`.
ConsistencyReport run_consistency_suite(int count, unsigned long seed);

}  // namespace pdflow::oracle
