#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "avesor/param_theory.hpp"
#include "oracles.hpp"

using namespace avesor;

namespace {

constexpr double sqrt5 = 2.23606797749979;

void expect_code(errc code, const auto& fn)
{
    try {
        fn();
        ADD_FAILURE() << "expected " << to_string(code);
    } catch (const error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

} // namespace

TEST(Tnorm, KnownValues)
{
    EXPECT_NEAR(tnorm(0.2358, 1.0), 0.3335, 5e-5);
    EXPECT_NEAR(tnorm(0.5747, 0.8218), 0.7301, 5e-5);
    for (double nu : {0.05, 0.3, 0.7, 0.99}) EXPECT_NEAR(tnorm(nu, 1.0), std::numbers::sqrt2 * nu, 1e-15);
}

TEST(Tnorm, DomainChecks)
{
    expect_code(errc::domain_error, [] { (void)tnorm(1.0, 1.0); });
    expect_code(errc::domain_error, [] { (void)tnorm(0.5, 2.0); });
    expect_code(errc::domain_error, [] { (void)tnorm(0.5, 0.0); });
    expect_code(errc::domain_error, [] { (void)f_eval(-0.1, 0.5); });
}

TEST(Tnorm, MatchesExplicitTwoByTwoOracle)
{
    for (int i = 1; i <= 100; ++i) {
        const double nu = i / 101.0;
        for (int j = 1; j <= 100; ++j) {
            const double omega = 2.0 * j / 101.0;
            const double t = tnorm(nu, omega);
            ASSERT_NEAR(t * t, oracle::h_lambda_max(nu, omega), 1e-12) << nu << ' ' << omega;
            ASSERT_NEAR(t, oracle::t_norm_svd(nu, omega), 1e-12);
            ASSERT_NEAR(g_eval(nu, omega), 2.0 * t * t, 1e-12);
        }
    }
}

TEST(FEval, RootsAndPolynomialForm)
{
    EXPECT_NEAR(f_eval(std::numbers::sqrt2 / 2, 1.0), 0.0, 1e-15);
    EXPECT_NEAR(f_eval(0.1667, 0.3938), 0.0, 1e-3);
    EXPECT_NEAR(f_eval(0.5, region_endpoint(RegionEndpoint::lower_below_branch, 0.5)), 0.0, 1e-10);
    for (double nu : {0.2, 0.6, 0.8})
        for (double w : {0.1, 0.7, 1.3, 1.9}) EXPECT_NEAR(f_eval(nu, w), oracle::f_poly(nu, w), 1e-13);
}

TEST(GEval, KnownAndTrivial)
{
    EXPECT_NEAR(g_eval(0.2358, 1.0), 2 * 0.3335 * 0.3335, 1e-4);
    EXPECT_NEAR(g_eval(0.3, 1.0), 4 * 0.09, 1e-15);
    EXPECT_NEAR(g_eval(0.5, 0.7), 2.0 * oracle::h_lambda_max(0.5, 0.7), 1e-12);
    EXPECT_NEAR(g_eval(0.5, 0.7), oracle::g_poly(0.5, 0.7), 1e-12);
}

TEST(GDerivative, EndpointLimits)
{
    // At omega = 0: r = 3, s = -6, -8(omega-1)^3 = 8, sqrt(r^2 - 4) = sqrt(5),
    // so the left derivative is -6 + (-18 + 8)/sqrt(5) = -6 - 2 sqrt(5).
    for (double nu : {0.1, 0.5, 0.9}) EXPECT_NEAR(g_derivative_left(nu, 0.0), -6.0 - 2.0 * sqrt5, 1e-12);
    EXPECT_LT(g_derivative_left(0.5, 0.0), 0.0);
    for (double nu : {0.1, 0.25, 0.6}) EXPECT_NEAR(g_derivative_left(nu, 1.0), 4 * nu * (4 * nu - 1), 1e-12);
    EXPECT_NEAR(g_derivative_left(0.25, 1.0), 0.0, 1e-15);
    // Approaching from inside agrees with the endpoint value.
    EXPECT_NEAR(g_derivative(0.3, 1e-9), g_derivative_left(0.3, 0.0), 1e-6);
    EXPECT_NEAR(g_derivative(0.3, 1 - 1e-9), 4 * 0.3 * (1.2 - 1), 1e-6);
}

TEST(GDerivative, MatchesFiniteDifferences)
{
    for (double nu : {0.1, 0.5, 0.9}) {
        for (double w : {0.2, 0.5, 0.9, 1.2, 1.5, 1.8}) {
            const double fd = oracle::central_difference([&](double x) { return oracle::g_poly(nu, x); }, w, 1e-6);
            EXPECT_NEAR(g_derivative(nu, w), fd, 1e-6 * std::max(1.0, std::abs(fd))) << nu << ' ' << w;
        }
    }
}

TEST(GDerivative, KinkAtOne)
{
    expect_code(errc::non_differentiable_point, [] { (void)g_derivative(0.5, 1.0); });
}

TEST(Region, KnownEndpoints)
{
    const auto r1 = convergent_region(0.1667);
    EXPECT_EQ(r1.kind, RegionCase::below_branch);
    EXPECT_NEAR(r1.lo, 0.3938, 5e-5);
    EXPECT_NEAR(r1.hi, 1.4184, 5e-5);

    const auto r3 = convergent_region(std::numbers::sqrt2 / 2);
    EXPECT_EQ(r3.kind, RegionCase::at_branch);
    EXPECT_NEAR(r3.lo, 0.4579, 5e-5);
    EXPECT_EQ(r3.hi, 1.0);

    const auto r2 = convergent_region(0.7615);
    EXPECT_EQ(r2.kind, RegionCase::above_branch);
    EXPECT_NEAR(r2.lo, 0.4692, 5e-5);
    EXPECT_NEAR(r2.hi, 0.9413, 5e-5);

    expect_code(errc::domain_error, [] { (void)convergent_region(1.0); });
    expect_code(errc::domain_error, [] { (void)convergent_region(0.0); });
}

TEST(Region, EndpointsAreZerosOfF)
{
    for (double nu : {0.1, 0.3, 0.6, 0.75, 0.9}) {
        const auto r = convergent_region(nu);
        EXPECT_NEAR(f_eval(nu, r.lo), 0.0, 1e-8) << nu;
        EXPECT_NEAR(f_eval(nu, r.hi), 0.0, 1e-8) << nu;
        // Independent bisection on the polynomial form of f.
        const double lo = oracle::bisect([&](double w) { return oracle::f_poly(nu, w); }, 0.05, 0.9 * r.lo + 0.1 * r.hi);
        EXPECT_NEAR(lo, r.lo, 1e-10);
    }
}

TEST(Region, InteriorIsConvergent)
{
    for (double nu = 0.01; nu < 1.0; nu += 0.01) {
        const auto r = convergent_region(nu);
        ASSERT_LT(0.0, r.lo);
        ASSERT_LT(r.lo, r.hi);
        ASSERT_LT(r.hi, 2.0);
        for (int k = 1; k <= 50; ++k) {
            const double w = r.lo + (r.hi - r.lo) * k / 51.0;
            ASSERT_LT(f_eval(nu, w), 0.0) << nu << ' ' << w;
            ASSERT_LT(tnorm(nu, w), 1.0);
        }
        // Just outside the region the bound fails.
        EXPECT_GE(tnorm(nu, std::max(1e-6, r.lo - 1e-3)), 1.0);
        EXPECT_GE(tnorm(nu, r.hi + 1e-3), 1.0);
    }
}

TEST(Region, ShrinksWithNu)
{
    for (double nu = 0.01; nu + 0.01 < 0.70; nu += 0.01) {
        const auto a = convergent_region(nu), b = convergent_region(nu + 0.01);
        EXPECT_GT(b.lo, a.lo);
        EXPECT_LT(b.hi, a.hi);
    }
    for (double nu = 0.72; nu + 0.01 < 1.0; nu += 0.01) {
        const auto a = convergent_region(nu), b = convergent_region(nu + 0.01);
        EXPECT_GT(b.lo, a.lo);
        EXPECT_LT(b.hi, a.hi);
    }
}

TEST(Region, Limits)
{
    EXPECT_NEAR(region_endpoint(RegionEndpoint::lower_below_branch, 1e-6), (3 - sqrt5) / 2, 1e-3);
    EXPECT_NEAR(region_endpoint(RegionEndpoint::upper_below_branch, 1e-6), (sqrt5 + 1) / 2, 1e-3);
    EXPECT_NEAR(region_endpoint(RegionEndpoint::lower_above_branch, 1 - 1e-6), (sqrt5 - 1) / 2, 1e-3);
    EXPECT_NEAR(region_endpoint(RegionEndpoint::upper_above_branch, 1 - 1e-6), (sqrt5 - 1) / 2, 1e-3);
    // Both sides of the branch point approach the same pair.
    const double s = std::numbers::sqrt2 / 2;
    EXPECT_NEAR(region_endpoint(RegionEndpoint::lower_below_branch, s - 1e-5), branch_point_lower_endpoint(), 1e-3);
    EXPECT_NEAR(region_endpoint(RegionEndpoint::lower_above_branch, s + 1e-5), branch_point_lower_endpoint(), 1e-3);
    EXPECT_NEAR(region_endpoint(RegionEndpoint::upper_below_branch, s - 1e-5), 1.0, 1e-3);
    EXPECT_NEAR(region_endpoint(RegionEndpoint::upper_above_branch, s + 1e-5), 1.0, 1e-3);
}

TEST(Region, WrongSideOfBranch)
{
    expect_code(errc::domain_error, [] { (void)region_endpoint(RegionEndpoint::lower_above_branch, 0.5); });
    expect_code(errc::domain_error, [] { (void)region_endpoint(RegionEndpoint::upper_below_branch, 0.8); });
}

TEST(OmegaOpt, KnownValues)
{
    EXPECT_EQ(omega_opt(0.1667), 1.0);
    EXPECT_EQ(omega_opt(0.25), 1.0);
    EXPECT_NEAR(omega_opt(0.5747), 0.8218, 5e-5);
    EXPECT_NEAR(omega_opt(0.4244), 0.9114, 1e-4); // inputs are rounded to 4 places
    EXPECT_NEAR(omega_opt(0.4265), 0.9102, 5e-5);
    EXPECT_NEAR(omega_opt(0.7615), 0.7210, 5e-5);
    EXPECT_NEAR(omega_opt(0.6397), 0.7848, 5e-5);
}

TEST(OmegaOpt, MinimizesTnormOnGrid)
{
    for (double nu : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        const double best = tnorm(nu, omega_opt(nu));
        for (int k = 1; k <= 1999; ++k) ASSERT_LE(best, tnorm(nu, k / 1000.0) + 1e-10) << nu << ' ' << k;
    }
}

TEST(OmegaOpt, RootOfLeftDerivative)
{
    for (double nu = 0.26; nu < 1.0; nu += 0.01) {
        const double w = omega_opt(nu);
        EXPECT_GT(w, 0.0);
        EXPECT_LT(w, 1.0);
        EXPECT_LE(std::abs(g_derivative_left(nu, w)), 1e-9) << nu;
    }
}

TEST(OmegaAopt, ClosedForm)
{
    EXPECT_NEAR(omega_aopt(0.1667), 0.8730, 5e-5);
    EXPECT_NEAR(omega_aopt(0.4244), 0.7569, 5e-5);
    EXPECT_NEAR(omega_aopt(1e-12), 1.0, 1e-11);
    for (double nu = 0.01; nu < 1.0; nu += 0.01) {
        const double w = omega_aopt(nu);
        EXPECT_NEAR(1.0 - w, nu * w * w, 1e-15);
        EXPECT_NEAR(w, (std::sqrt(4 * nu + 1) - 1) / (2 * nu), 1e-13);
    }
}

TEST(OmegaAopt, BelowOptimalAndLooserBound)
{
    for (double nu = 0.005; nu < 1.0; nu += 0.005) {
        const double wa = omega_aopt(nu), wo = omega_opt(nu);
        EXPECT_LT(wa, wo) << nu;
        EXPECT_LT(tnorm(nu, wo), eta(nu, wa) / tau()) << nu;
        const auto r = convergent_region(nu);
        EXPECT_TRUE(r.contains(wa)) << nu;
        EXPECT_TRUE(r.contains(wo)) << nu;
    }
}

TEST(OmegaGuo, Values)
{
    EXPECT_NEAR(omega_guo(0.1667), 1.0455, 1e-4);
    EXPECT_EQ(omega_guo(0.0), 1.0);
    EXPECT_NEAR(omega_guo(0.2358), 1.0671, 5e-5);
    expect_code(errc::domain_error, [] { (void)omega_guo(1.0); });
}

TEST(Eta, Values)
{
    EXPECT_NEAR(eta_ratio(0.1667, 0.8730), 0.3326, 5e-5);
    EXPECT_NEAR(eta_ratio(0.2358, 0.8354), 0.4309, 5e-5);
    EXPECT_EQ(eta(0.4, 1.0), 0.4);
    EXPECT_NEAR(tau(), 2.0 / (3.0 + sqrt5), 1e-16);
}

TEST(Eta, BoundsTnorm)
{
    for (int i = 1; i < 100; ++i)
        for (int j = 1; j < 200; ++j) {
            const double nu = i / 100.0, w = j / 100.0;
            ASSERT_LE(tnorm(nu, w), eta_ratio(nu, w) + 1e-14) << nu << ' ' << w;
        }
}

TEST(ParamBundle, BlockTridiagRows)
{
    struct Row {
        double nu, wo, waopt, wopt, tn, er, lo, hi;
    };
    for (const Row r : {Row{0.2358, 1.0671, 0.8354, 1, 0.3335, 0.4309, 0.3994, 1.3447},
                        Row{0.2497, 1.0717, 0.8286, 1, 0.3531, 0.4488, 0.4006, 1.3308},
                        Row{0.4265, 1.1381, 0.7561, 0.9102, 0.5807, 0.6384, 0.4177, 1.1769}}) {
        const auto p = param_bundle(r.nu);
        EXPECT_NEAR(p.omega_o, r.wo, 6e-5) << r.nu;
        EXPECT_NEAR(p.omega_aopt, r.waopt, 6e-5) << r.nu;
        EXPECT_NEAR(p.omega_opt, r.wopt, 6e-5) << r.nu;
        EXPECT_NEAR(p.tnorm_at_opt, r.tn, 6e-5) << r.nu;
        EXPECT_NEAR(p.eta_ratio_at_aopt, r.er, 6e-5) << r.nu;
        EXPECT_NEAR(p.region.lo, r.lo, 6e-5) << r.nu;
        EXPECT_NEAR(p.region.hi, r.hi, 6e-5) << r.nu;
        EXPECT_EQ(p.region.kind, RegionCase::below_branch);
        EXPECT_TRUE(p.omega_o_in_region);
        EXPECT_TRUE(p.region.contains(p.omega_aopt));
        EXPECT_TRUE(p.region.contains(p.omega_opt));
        EXPECT_LT(p.tnorm_at_opt, 1.0);
        EXPECT_LE(p.tnorm_at_opt, p.eta_ratio_at_aopt);
    }
}

TEST(ParamBundle, GuoParameterCanLeaveRegion)
{
    // mesh1e1-like nu: omega_o = 1.2105 lies above the region (0.4361, 1.0753).
    const auto p = param_bundle(0.5747);
    EXPECT_NEAR(p.omega_o, 1.2105, 6e-5);
    EXPECT_FALSE(p.omega_o_in_region);
}

TEST(Templates, LongDoubleAgrees)
{
    for (double nu : {0.2, 0.55, 0.85}) {
        EXPECT_NEAR(double(tnorm<long double>(nu, 0.9L)), tnorm(nu, 0.9), 1e-14);
        EXPECT_NEAR(double(omega_opt<long double>(nu)), omega_opt(nu), 1e-11);
        const auto r = convergent_region<long double>(nu);
        EXPECT_NEAR(double(r.lo), convergent_region(nu).lo, 1e-12);
    }
}
