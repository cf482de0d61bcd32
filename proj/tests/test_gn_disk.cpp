#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hfd/gn_disk.hpp"

using namespace hfd;
using std::numbers::pi;

namespace {

const AStarResult& located() {
    static const AStarResult r = find_a_star(5.0, 10.0, 1e-10);
    return r;
}

}  // namespace

TEST(Shoot, ConstantSolution) {
    const ShootingResult r = shoot(1.0);
    EXPECT_NEAR(r.s_of_a, 0.0, 1e-14);
    EXPECT_EQ(r.sign_changes, 0);
    for (double u : r.profile.values) EXPECT_NEAR(u, 1.0, 1e-14);
}

TEST(Shoot, LaunchSeriesAndInitialValues) {
    for (double a : {0.5, 2.0, 7.5}) {
        const ShootingResult r = shoot(a, 1e-12);
        EXPECT_EQ(r.profile.values.front(), a);
        EXPECT_EQ(r.derivative.front(), 0.0);
        // the series solves the equation through second order at small r
        const double h = 1e-3;
        const auto y = shooting_series(a, h);
        const double c = 0.25 * (a - a * a * a);
        const double residual = -2.0 * c - y[1] / h + y[0] - y[0] * y[0] * y[0];
        EXPECT_NEAR(residual, 0.0, 10.0 * std::abs(c) * a * a * h * h + 1e-12);
        // u(1/2000) from the integrator vs the series
        EXPECT_NEAR(r.profile.values[1], shooting_series(a, r.profile.r[1])[0], 1e-9 * a);
    }
}

TEST(Shoot, SmallAmplitudeBesselOracle) {
    // -u'' - u'/r + u = 0 to leading order: u = a I0(r), s = a I1(1)
    const double a = 1e-5;
    const ShootingResult r = shoot(a, 1e-12);
    EXPECT_NEAR(r.s_of_a, a * std::cyl_bessel_i(1.0, 1.0), 1e-9 * a);
    EXPECT_EQ(r.sign_changes, 0);
    EXPECT_NE(r.s_of_a, 0.0);
    EXPECT_NEAR(r.profile.values.back(), a * std::cyl_bessel_i(0.0, 1.0), 1e-9 * a);
}

TEST(Shoot, Errors) {
    EXPECT_THROW(shoot(0.0), DomainError);
    EXPECT_THROW(shoot(2.0, 1e-5), DomainError);
}

TEST(Shoot, EnergyDecaysForLargeAmplitude) {
    // E = u'^2/2 + u^4/4 - u^2/2 satisfies E' = -u'^2/r <= 0, so the guard is never hit
    for (double a : {10.0, 100.0, 2000.0}) {
        const ShootingResult r = shoot(a, 1e-10);
        double prev = INFINITY;
        for (std::size_t i = 0; i < r.profile.size(); i += 50) {
            const double u = r.profile.values[i], du = r.derivative[i];
            const double E = 0.5 * du * du + 0.25 * u * u * u * u - 0.5 * u * u;
            EXPECT_LE(E, prev * (1.0 + 1e-6) + 1e-6) << a << " r=" << r.profile.r[i];
            prev = E;
        }
        for (double u : r.profile.values) EXPECT_LE(std::abs(u), a);
    }
}

TEST(Shoot, ContinuityInA) {
    for (double a : {0.3, 2.0, 5.0, 7.5, 9.0}) {
        double prev = INFINITY;
        for (double delta : {1e-2, 1e-3, 1e-4, 1e-5}) {
            const double diff = std::abs(shoot(a + delta, 1e-12).s_of_a - shoot(a, 1e-12).s_of_a);
            EXPECT_LT(diff, prev) << a << " " << delta;
            prev = diff;
        }
        EXPECT_LT(prev, 1e-2) << a;
    }
}

TEST(AStar, LocatesCriticalProfile) {
    const AStarResult& r = located();
    EXPECT_NEAR(r.a_star, 7.52449, 1e-4);
    EXPECT_EQ(r.shot.sign_changes, 1);
    EXPECT_LE(std::abs(r.shot.s_of_a), 1e-9);
    ASSERT_EQ(r.shot.zeros.size(), 1u);
    EXPECT_GT(r.shot.zeros[0], 0.0);
    EXPECT_LT(r.shot.zeros[0], 1.0);
}

TEST(AStar, TrivialRootIsRejected) {
    try {
        find_a_star(0.5, 1.5);
        FAIL() << "expected BracketError";
    } catch (const BracketError& e) {
        EXPECT_NE(std::string(e.what()).find("0 sign changes"), std::string::npos) << e.what();
    }
    const auto roots = scan_roots(0.5, 1.5, 1e-10, 51);
    ASSERT_EQ(roots.size(), 1u);
    EXPECT_NEAR(roots[0].a, 1.0, 1e-9);
    EXPECT_FALSE(roots[0].admissible);
    EXPECT_THROW(find_a_star(2.0, 5.0), BracketError);
}

TEST(AStar, ToleranceRefinementConverges) {
    const double ref = located().a_star;
    double prev = INFINITY;
    for (double tol : {1e-4, 1e-6, 1e-8}) {
        const double a = find_a_star(5.0, 10.0, tol).a_star;
        const double gap = std::abs(a - ref);
        EXPECT_LE(gap, prev) << tol;
        EXPECT_LT(gap, 1e-3) << tol;
        prev = gap;
    }
}

TEST(OptimalConstant, CriticalProfile) {
    const AStarResult& r = located();
    const OptimalConstant c = optimal_constant(r.shot.profile, r.shot.derivative);
    EXPECT_NEAR(c.C, 0.0564922, 1e-6);
    EXPECT_LT(c.C, 2.0 / std::sqrt(pi));
    EXPECT_LE(c.identity_gap, 1e-6);
    // derivative rebuilt by finite differences gives the same constant
    const OptimalConstant fd = optimal_constant(r.shot.profile);
    EXPECT_EQ(fd.C, c.C);
    EXPECT_LE(fd.identity_gap, 1e-4);
}

TEST(OptimalConstant, QuadratureSanityValues) {
    std::vector<double> r(2001), one(2001, 1.0), zero(2001, 0.0);
    for (int i = 0; i <= 2000; ++i) r[i] = i / 2000.0;
    const OptimalConstant c = optimal_constant(RadialField::signed_field(2, r, one), zero);
    EXPECT_NEAR(c.quartic, pi, 1e-13);
    EXPECT_NEAR(c.C, 1.0 / std::sqrt(pi), 1e-14);
    EXPECT_NEAR(c.energy, pi, 1e-13);
    std::vector<double> odd(r.begin(), r.begin() + 2000), v(2000, 1.0);
    EXPECT_THROW(simpson(odd, v), ConfigError);
}

TEST(Rayleigh, ScalesLinearlyWithRadius) {
    auto u = [](double r) { return std::exp(-r * r) + 0.3 * std::cos(2.0 * r); };
    auto du = [](double r) { return -2.0 * r * std::exp(-r * r) - 0.6 * std::sin(2.0 * r); };
    const double q1 = disk_rayleigh_quotient(u, du, 1.0);
    for (double R : {0.25, 2.0, 10.0}) {
        const double qR = disk_rayleigh_quotient([&](double r) { return u(r / R); }, [&](double r) { return du(r / R) / R; }, R);
        EXPECT_NEAR(qR, R * q1, 1e-12 * R * q1) << R;
    }
    // the bound (2R/sqrt(pi)) holds for the sample
    EXPECT_LE(q1, 2.0 / std::sqrt(pi));
    EXPECT_THROW(disk_rayleigh_quotient(u, du, 0.0), DomainError);
}

TEST(Sweep, CsvShape) {
    const std::string csv = sweep_csv(1.0, 8.0, 8);
    EXPECT_EQ(csv.rfind("a,s,sign_changes\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
    EXPECT_THROW(sweep_csv(1.0, 2.0, 1), ConfigError);
}
