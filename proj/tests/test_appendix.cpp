#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "avesor/appendix.hpp"
#include "oracles.hpp"

using namespace avesor;

TEST(Deltas, PointValues)
{
    const auto half = delta_values(0.5);
    EXPECT_GT(half.d1, 0.0);
    EXPECT_GT(half.d2, 0.0);
    const auto high = delta_values(0.9);
    EXPECT_GT(high.d1, 0.0);
    EXPECT_GT(high.d3, 0.0);
    EXPECT_GT(delta_values(0.25).d1, 0.0);
    EXPECT_THROW((void)delta_values(std::numbers::sqrt2 / 2), error);
}

TEST(Deltas, EqualEndpointRadicands)
{
    // Two algebraic routes to the same quantity.
    for (double nu = 0.01; nu < 0.7; nu += 0.01) {
        const auto d = delta_values(nu);
        EXPECT_NEAR(d.d1, endpoint_radicand(RegionEndpoint::lower_below_branch, nu), 1e-12);
        EXPECT_NEAR(d.d2, endpoint_radicand(RegionEndpoint::upper_below_branch, nu), 1e-12);
    }
    for (double nu = 0.72; nu < 1.0; nu += 0.01) {
        const auto d = delta_values(nu);
        EXPECT_NEAR(d.d1, endpoint_radicand(RegionEndpoint::lower_above_branch, nu), 1e-12);
        EXPECT_NEAR(d.d3, endpoint_radicand(RegionEndpoint::upper_above_branch, nu), 1e-12);
    }
}

TEST(Deltas, PositiveOnFineGrids)
{
    const GridSpec below{0.001, 0.001, 0.706}, above{0.708, 0.001, 0.999};
    EXPECT_TRUE(scan_delta(DeltaId::d1, below).holds());
    EXPECT_TRUE(scan_delta(DeltaId::d2, below).holds());
    EXPECT_TRUE(scan_delta(DeltaId::d1, above).holds());
    const auto d3 = scan_delta(DeltaId::d3, above);
    EXPECT_TRUE(d3.holds());
    EXPECT_EQ(d3.evaluated, 292u);
}

TEST(G1Derivative, SinglePointAndFiniteDifference)
{
    EXPECT_GT(g1_derivative(0.5, 0.5), 0.0);
    for (double nu : {0.05, 0.2, 0.5, 0.95}) {
        for (double w : {0.05, 0.3, 0.6, 0.816, 0.97}) {
            const double fd =
                oracle::central_difference([&](double x) { return g_derivative_left(nu, x); }, w, 1e-6);
            const double v = g1_derivative(nu, w);
            EXPECT_NEAR(v, fd, 1e-4 * std::abs(fd)) << nu << ' ' << w;
        }
    }
}

TEST(G1Derivative, CoarseScanPositive)
{
    const GridSpec g{0.05, 0.1, 0.95};
    const auto rep = scan_g1_derivative(g, g, 1);
    EXPECT_EQ(rep.evaluated, 100u);
    EXPECT_TRUE(rep.holds());
    EXPECT_GT(rep.min_value, 0.0);
}

TEST(G1Derivative, FineScanMinimum)
{
    const GridSpec g{0.001, 0.001, 0.999};
    const auto rep = scan_g1_derivative(g, g);
    EXPECT_EQ(rep.evaluated + rep.skipped.size(), 999u * 999u);
    EXPECT_TRUE(rep.holds());
    EXPECT_NEAR(rep.min_value, 9.0129, 1e-3);
    EXPECT_NEAR(rep.argmin.nu, 0.1951, 2e-3);
    EXPECT_NEAR(rep.argmin.omega, 0.8163, 2e-3);
}

TEST(G1Derivative, WorkerCountDoesNotChangeReport)
{
    const GridSpec g{0.01, 0.01, 0.99};
    const auto a = scan_g1_derivative(g, g, 1);
    const auto b = scan_g1_derivative(g, g, 4);
    EXPECT_EQ(a.evaluated, b.evaluated);
    EXPECT_EQ(a.min_value, b.min_value);
    EXPECT_EQ(a.argmin.nu, b.argmin.nu);
    EXPECT_EQ(a.argmin.omega, b.argmin.omega);
}

TEST(G1Derivative, RejectsGridsOutsideUnitSquare)
{
    EXPECT_THROW((void)scan_g1_derivative({0.0, 0.1, 0.9}, {0.1, 0.1, 0.9}), error);
    EXPECT_THROW((void)scan_g1_derivative({0.1, 0.1, 0.9}, {0.1, 0.1, 1.0}), error);
}

TEST(Monotonicity, EndpointsOnTheirRanges)
{
    const auto w1 = check_root_monotonicity(RegionEndpoint::lower_below_branch, {0.01, 0.01, 0.70});
    EXPECT_TRUE(w1.holds());
    EXPECT_EQ(w1.evaluated, 70u);
    EXPECT_TRUE(check_root_monotonicity(RegionEndpoint::upper_below_branch, {0.01, 0.01, 0.70}).holds());
    EXPECT_TRUE(check_root_monotonicity(RegionEndpoint::lower_above_branch, {0.72, 0.01, 0.99}).holds());
    EXPECT_TRUE(check_root_monotonicity(RegionEndpoint::upper_above_branch, {0.72, 0.01, 0.99}).holds());
    EXPECT_GE(endpoint_radicand(RegionEndpoint::upper_below_branch, 0.5), 0.0);
}

TEST(Monotonicity, RangeChecked)
{
    EXPECT_THROW((void)check_root_monotonicity(RegionEndpoint::lower_above_branch, {0.5, 0.01, 0.6}), error);
    EXPECT_THROW((void)check_root_monotonicity(RegionEndpoint::lower_below_branch, {0.6, 0.01, 0.8}), error);
}

TEST(BranchPoint, LowerEndpointValue)
{
    EXPECT_NEAR(branch_point_lower_endpoint(), 0.4579, 5e-5);
    EXPECT_NEAR(f_eval(std::numbers::sqrt2 / 2, branch_point_lower_endpoint()), 0.0, 1e-14);
}

TEST(GridSpec, CountAndParse)
{
    EXPECT_EQ((GridSpec{0.001, 0.001, 1.999}).count(), 1999u);
    EXPECT_EQ((GridSpec{0.01, 0.01, 1.99}).count(), 199u);
    const auto g = GridSpec::parse("0.1:0.05:0.3");
    EXPECT_EQ(g.count(), 5u);
    EXPECT_DOUBLE_EQ(g.at(4), 0.3);
    EXPECT_THROW((void)GridSpec::parse("0.1:0.3"), error);
    EXPECT_THROW((void)GridSpec::parse("a:b:c"), error);
    EXPECT_THROW((void)GridSpec::parse("0.1:0:0.3"), error);
}
