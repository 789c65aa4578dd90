#include "support.hpp"

#include <gtest/gtest.h>

using namespace pdflow;

TEST(Consistency, RandomInstancesSatisfyAllInvariants) {
    const oracle::ConsistencyReport rep = oracle::run_consistency_suite(100, 20241015);
    EXPECT_EQ(rep.instances, 100);
    EXPECT_EQ(rep.failed, 0);
    for (const std::string& f : rep.failures) ADD_FAILURE() << f;
    EXPECT_LE(rep.worst_gradient, 1e-6);
    EXPECT_LE(rep.worst_field, 1e-10);
    EXPECT_EQ(rep.worst_reduction, 0.0);
    EXPECT_LE(rep.worst_stationarity, 1e-9);
    EXPECT_LE(rep.worst_energy_rate, 1e-4);
}

TEST(Consistency, SeedsAreReproducible) {
    const oracle::ConsistencyReport a = oracle::run_consistency_suite(5, 7), b = oracle::run_consistency_suite(5, 7);
    EXPECT_EQ(a.worst_field, b.worst_field);
    EXPECT_EQ(a.worst_energy_rate, b.worst_energy_rate);
}
