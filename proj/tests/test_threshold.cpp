#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "hfd/threshold.hpp"

using namespace hfd;

namespace {

const ThresholdResult& base_d3() {
    static const ThresholdResult r = threshold_constants(derive_params(3, 5.0 / 6.0), CompanionConstants{});
    return r;
}

/// sup of |d/dr B(1 - 1/alpha, r)| by central differences on a fine grid, refined around the peak.
double gradient_sup_by_sampling(const ParamSet& p) {
    auto slope = [&](double r) {
        const double h = 1e-6 * std::max(1.0, r);
        return std::abs(barenblatt_time(p, 1.0, r + h) - barenblatt_time(p, 1.0, r - h)) / (2 * h);
    };
    double best = 0.0, arg = 0.0;
    for (int i = 1; i < 200000; ++i) {
        const double r = 1e-4 * i;
        const double s = slope(r);
        if (s > best) best = s, arg = r;
    }
    for (int i = -1000; i <= 1000; ++i) best = std::max(best, slope(arg + 1e-7 * i));
    return best;
}

}  // namespace

TEST(Threshold, RadiusExamples) {
    EXPECT_DOUBLE_EQ(radius_R(0.0, 1.3), 1.0);
    EXPECT_NEAR(radius_R(3.0, 1.0), 4.0, 1e-15);
    EXPECT_NEAR(radius_R(4.0, 2.0), 3.0, 1e-15);
    EXPECT_THROW(radius_R(-1.0, 1.5), DomainError);
}

TEST(Threshold, RhoOverHandValue) {
    ParamSet p = derive_params(2, 0.5 + 1e-9);
    p.m = 0.5;
    p.mu = 1.0;
    // eps -> 1: ((sqrt2+1)/(sqrt2-1))^{1/2} = sqrt2 + 1
    const RhoResult r = rho_eps(p, 1.0 - 1e-13, TowerScalar::from_log(-1000.0));
    EXPECT_NEAR(r.rho_over.to_double(), std::sqrt(2.0) + 1.0, 1e-12);
    EXPECT_NEAR(r.rho_over.to_double(), 2.414, 5e-4);
}

TEST(Threshold, RhoOverSandwichOnGrid) {
    for (double m : {0.34, 0.5, 0.7, 0.9, 0.99}) {
        const ParamSet p = derive_params(1, m);
        for (double eps : {1e-8, 1e-4, 1e-2, 0.1, 0.3, 0.5}) {
            const RhoResult r = rho_eps(p, eps, TowerScalar::from_log(-50.0));
            const double base = 1.0 / (std::sqrt(1.0 - m) * p.mu * std::sqrt(eps));
            const double ro = r.rho_over.to_double();
            EXPECT_LE(base, ro) << m << " " << eps;
            EXPECT_LE(ro, 4.0 * base) << m << " " << eps;
            EXPECT_TRUE(r.over_sandwich_ok);
            EXPECT_TRUE(r.rho.same_as(tower_max(r.rho_over, r.rho_under)));
        }
    }
}

TEST(Threshold, RhoUnderNearEpsUnder) {
    const ParamSet p = derive_params(3, 5.0 / 6.0);
    const double eps_under = 0.5;
    const TowerScalar ome = tw(1.0 - eps_under);
    for (double gap : {1e-3, 1e-8, 1e-12}) {
        const RhoResult r = rho_eps(p, eps_under - gap, ome);
        EXPECT_GT(r.rho_under.sign(), 0);
        EXPECT_TRUE(std::isfinite(r.rho_under.to_double()));
    }
    EXPECT_THROW(rho_eps(p, eps_under, ome), DomainError);
    EXPECT_THROW(rho_eps(p, 0.6, ome), DomainError);
}

TEST(Threshold, TimesWithZeroTail) {
    const ThresholdResult& b = base_d3();
    const ParamSet& p = b.inputs.params;
    const TimeResult t = T_eps(p, 1e-3, 0.0, b.positivity.kappa_star, b.smoothing.kbar);
    EXPECT_TRUE(t.t0.is_zero());
    EXPECT_TRUE(t.T_over.is_zero());
    EXPECT_TRUE(t.T.same_as(t.T_under));
    EXPECT_NEAR(t.T_under.to_double(), (2.0 / p.alpha) / (1.0 - std::pow(1.0 - 1e-3, 1.0 - p.m)), 1e-9 * t.T_under.to_double());
}

TEST(Threshold, TUnderMonotone) {
    const ThresholdResult& b = base_d3();
    const ParamSet& p = b.inputs.params;
    auto Tu = [&](double eps, double A) { return T_eps(p, eps, A, b.positivity.kappa_star, b.smoothing.kbar).T_under; };
    for (double eps : {1e-5, 1e-3}) {
        TowerScalar prev = Tu(eps, 0.0);
        for (double A = 0.1; A < 1e4; A *= 3.0) {
            EXPECT_GT(Tu(eps, A), prev);
            prev = Tu(eps, A);
        }
    }
    for (double A : {0.0, 1.0, 100.0}) {
        TowerScalar prev = Tu(1e-7, A);
        for (double eps = 2e-7; eps < 0.5; eps *= 2.0) {
            EXPECT_LT(Tu(eps, A), prev);
            prev = Tu(eps, A);
        }
    }
}

TEST(Threshold, CConstantBranches) {
    const ParamSet p = derive_params(3, 5.0 / 6.0);
    EXPECT_TRUE(c_constant(p, tw(1e-300)).same_as(tw(1.0)));
    const TowerScalar big = c_constant(p, base_d3().smoothing.kbar);
    EXPECT_GT(big, tw(1.0));
    const double expect = std::pow(2.0, 5.0 - p.m) * std::pow(p.b_const, p.alpha);
    EXPECT_NEAR(tower_log(big).to_double(),
                std::log(expect) + (1.0 - p.m) * tower_log(base_d3().smoothing.kbar).to_double(), 1e-10);
}

TEST(Lambda, Q2SupBracketByHand) {
    const ParamSet p = derive_params(3, 5.0 / 6.0);
    const LambdaBounds lb = lambda_bounds(p, 1.0, 1.0);
    EXPECT_NEAR(lb.sup_Q2, std::pow(p.b_const, 3) * 16.0, 1e-14);
}

TEST(Lambda, BracketsContainSampledEnvelopes) {
    for (auto [d, m] : {std::pair{1, 0.5}, std::pair{2, 0.7}, std::pair{3, 5.0 / 6.0}, std::pair{5, 0.9}}) {
        const ParamSet p = derive_params(d, m);
        const LambdaBounds lb = lambda_bounds(p, 1.0, 1.0);
        double sup2 = 0.0, sup4 = 0.0, inf_all = INFINITY;
        for (int i = 0; i <= 60; ++i) {
            const double t = 0.25 + 1.75 * i / 60.0;
            for (int j = 0; j <= 80; ++j) {
                const double r = 8.0 * j / 80.0;
                const double b1 = barenblatt_shifted(p, t, r);
                sup2 = std::max(sup2, b1);
                inf_all = std::min(inf_all, b1);
                if (r < 0.25) continue;
                for (double k : {1.0, 3.0, 1e2, 1e4, 1e8}) {
                    const double bk = barenblatt_shifted(p, t, r, k);
                    sup4 = std::max(sup4, bk);
                    inf_all = std::min(inf_all, bk);
                }
            }
        }
        EXPECT_NEAR(sup2, lb.sup_Q2, 1e-12 * lb.sup_Q2) << d;  // attained at t = 1/4, x = 0
        EXPECT_LE(sup4, lb.sup_Q4_k * (1 + 1e-12)) << d;
        EXPECT_GE(inf_all, lb.inf_lower * (1 - 1e-12)) << d;
        EXPECT_GT(lb.lambda0, 0.0);
        EXPECT_LE(lb.lambda0, lb.lambda1);
        EXPECT_TRUE(std::isfinite(lb.lambda1));
        EXPECT_GE(lb.lambda1 + 1.0 / lb.lambda0, 2.0 * std::sqrt(lb.lambda1 / lb.lambda0));
    }
}

TEST(Lambda, EqualEnvelopesAndConfigErrors) {
    const LambdaBounds lb = lambda_from_envelopes(0.7, 2.0, 2.0, 3.0, 3.0);
    EXPECT_DOUBLE_EQ(lb.lambda0, lb.lambda1);
    EXPECT_DOUBLE_EQ(lb.lambda0, 0.7 * std::pow(6.0, -0.3));
    EXPECT_THROW(lambda_from_envelopes(0.7, 1.0, 2.0, 3.0, 1.0), ConfigError);
    EXPECT_THROW(lambda_from_envelopes(0.7, 1.0, 1.0, 1.0, 3.0), ConfigError);  // inf above sup
}

TEST(InnerConstant, ThetaAndTwoPowRatio) {
    EXPECT_NEAR(theta_of_nu(3, tw(1.0)).to_double(), 0.25, 1e-16);
    const double nu = 1e-8;
    const double direct = std::pow(2.0, nu) / (std::pow(2.0, nu) - 1.0);
    const double expansion = two_pow_ratio_expansion(tw(nu)).to_double();
    EXPECT_LE(std::abs(expansion - direct) / direct, nu / 2);
    EXPECT_NEAR(two_pow_ratio(tw(nu)).value.to_double() / direct, 1.0, 1e-7);
    EXPECT_FALSE(two_pow_ratio(tw(nu)).expansion);
    const TwoPowRatio tiny = two_pow_ratio(TowerScalar::from_log(-1e6));
    EXPECT_TRUE(tiny.expansion);
    EXPECT_NEAR(tower_log(tiny.value).to_double(), 1e6 - std::log(std::log(2.0)), 1e-9);
}

TEST(InnerConstant, GradientNormClosedForm) {
    // m = 1/2, d = 1 by hand: (1/3)^{4/3} (1/4) (125/27) / sqrt(5/4)
    const ParamSet p = derive_params(1, 0.5);
    const double hand = std::pow(1.0 / 3.0, 4.0 / 3.0) * 0.25 * (125.0 / 27.0) / std::sqrt(1.25);
    EXPECT_NEAR(barenblatt_gradient_norm(p), hand, 1e-15);
    for (auto [d, m] : {std::pair{1, 0.5}, std::pair{2, 0.7}, std::pair{3, 5.0 / 6.0}}) {
        const ParamSet q = derive_params(d, m);
        const double sampled = gradient_sup_by_sampling(q);
        EXPECT_NEAR(barenblatt_gradient_norm(q), sampled, 1e-7 * sampled) << d;
        EXPECT_DOUBLE_EQ(gradient_c2(q), 2.0 * std::max(q.b_const, barenblatt_gradient_norm(q)));
    }
}

TEST(CStar, EpsPowerTimesKappa2IsConstant) {
    const ThresholdResult& b = base_d3();
    const ParamSet& p = b.inputs.params;
    const TowerScalar closed = tower_log(b.cstar.term2);
    for (double eps : {1e-3, 1e-5}) {
        const TowerScalar l1 = log_eps_a_kappa2(p, eps, b.K, b.theta);
        const TowerScalar l2 = log_eps_a_kappa2(p, eps / 2, b.K, b.theta);
        EXPECT_LE(std::abs(l1.log_abs() - l2.log_abs()), 1e-10 * std::abs(l1.log_abs()));
        EXPECT_NEAR(l1.log_abs(), closed.log_abs(), 1e-10 * std::abs(closed.log_abs()));
    }
    // moderate theta: the flat evaluation resolves the cancellation and agrees
    const TowerScalar theta = tw(0.1), K = tw(50.0);
    const double lc = (p.alpha - 1.0) * std::log(4.0 * p.alpha) + p.alpha / 0.1 * std::log(50.0);
    for (double eps : {1e-2, 5e-3, 1e-3}) {
        EXPECT_NEAR(log_eps_a_kappa2_flat(p, eps, K, theta).to_double(), lc, 1e-10 * lc);
        EXPECT_NEAR(log_eps_a_kappa2(p, eps, K, theta).to_double(), lc, 1e-12 * lc);
    }
}

TEST(CStar, GridSupFindsInteriorPeak) {
    // sup of x e^{-x} on (1e-3, 30) is 1/e at x = 1
    const SupResult s = grid_sup([](double x) { return tw(x * std::exp(-x)); }, 1e-3, 30.0, 500);
    EXPECT_NEAR(s.value.to_double(), std::exp(-1.0), 1e-15);
    EXPECT_NEAR(s.argmax, 1.0, 1e-6);
}

TEST(TStar, ZeroTailIsCStarOverEpsPowerA) {
    const ThresholdResult r = threshold_for(base_d3(), 1e-4, 0.0, 0.0);
    const TowerScalar expect = tower_log(r.cstar.c_star) + r.cstar.a_exp * tw(-std::log(1e-4));
    EXPECT_TRUE(r.tstar.log_t_star.same_as(expect));
    EXPECT_DOUBLE_EQ(r.tstar.log_bracket, 0.0);
}

TEST(TStar, MonotoneOnGrid) {
    const ThresholdResult& b = base_d3();
    const double hi = eps_admissible_bound(b);
    std::vector<double> eps_grid, A_grid{0.0, 0.5, 1.0, 10.0, 1e3}, G_grid{0.0, 0.1, 1.0, 7.0, 1e4};
    for (int i = 0; i < 5; ++i) eps_grid.push_back(hi * std::pow(10.0, -6.0 + 1.4 * i) * 0.999);
    std::vector<std::vector<std::vector<TStar>>> t(5, std::vector<std::vector<TStar>>(5, std::vector<TStar>(5)));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int k = 0; k < 5; ++k) t[i][j][k] = threshold_for(b, eps_grid[i], A_grid[j], G_grid[k]).tstar;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int k = 0; k < 5; ++k) {
                if (i + 1 < 5) EXPECT_GT(compare_t_star(t[i][j][k], t[i + 1][j][k]), 0) << i << j << k;
                if (j + 1 < 5) EXPECT_LT(compare_t_star(t[i][j][k], t[i][j + 1][k]), 0) << i << j << k;
                if (k + 1 < 5) EXPECT_LT(compare_t_star(t[i][j][k], t[i][j][k + 1]), 0) << i << j << k;
            }
}

TEST(Pipeline, AdmissibilityErrors) {
    const ThresholdResult& b = base_d3();
    EXPECT_THROW(threshold_for(b, b.positivity.eps_md, 0.0, 0.0), DomainError);
    EXPECT_THROW(threshold_for(b, 0.999 * b.positivity.eps_md, 0.0, 0.0), DomainError);  // above chi eta
    EXPECT_THROW(threshold_for(b, 1e-4, -1.0, 0.0), DomainError);
    EXPECT_NO_THROW(threshold_for(b, 0.5 * eps_admissible_bound(b), 0.0, 0.0));
}

TEST(Pipeline, NuInUnitIntervalForComputedHbar) {
    for (auto [d, m] : {std::pair{1, 0.5}, std::pair{2, 0.7}, std::pair{3, 5.0 / 6.0}, std::pair{6, 0.9}}) {
        const ThresholdResult r = threshold_constants(derive_params(d, m), CompanionConstants{});
        EXPECT_GT(r.nu.nu.sign(), 0);
        EXPECT_LT(r.nu.nu, tw(1.0));
        // ln nu + ln hbar = -ln ln 4 up to the expansion error and the
        // resolution of ln hbar itself, which is far coarser here
        ASSERT_TRUE(r.nu.expansion);
        const TowerScalar sum = tower_log(r.nu.nu) + r.log_hbar;
        const double resolution = 1e-12 * r.log_hbar.to_double();
        EXPECT_LT(r.nu.abs_error, tw(1e-300));
        EXPECT_NEAR(sum.to_double(), -std::log(std::log(4.0)), resolution);
    }
}

TEST(Report, DeterministicAndValid) {
    ThresholdInputs in;
    in.params = derive_params(3, 5.0 / 6.0);
    in.eps = 1e-4;
    in.A = 1.0;
    in.G = 2.0;
    const std::string a = threshold_report(run_threshold(in)).to_json().dump();
    const std::string b = threshold_report(run_threshold(in)).to_json().dump();
    EXPECT_EQ(a, b);
    const json j = json::parse(a);
    EXPECT_TRUE(validate_report_json(j).empty());
    // labels known; provenance only refers to inputs or earlier entries
    std::set<std::string> seen;
    for (const auto& [k, v] : j["inputs"].items()) seen.insert(k);
    for (const auto& e : j["entries"]) {
        EXPECT_TRUE(is_known_label(e["equation_label"].get<std::string>())) << e.dump();
        for (const auto& src : e["provenance"]) EXPECT_TRUE(seen.count(src.get<std::string>())) << e.dump();
        seen.insert(e["name"].get<std::string>());
    }
}

TEST(Report, CompanionConstantsAreFlagged) {
    ThresholdInputs in;
    in.params = derive_params(3, 5.0 / 6.0);
    in.eps = 1e-4;
    in.companion.M_over = 1.1 * barenblatt_mass(in.params);
    const ConstantReport rep = threshold_report(run_threshold(in));
    for (const char* name : {"M_over", "C_over", "C_under", "C_dnu1"}) {
        ASSERT_TRUE(rep.has(name));
        EXPECT_TRUE(rep.get(name).configured) << name;
    }
    EXPECT_FALSE(rep.get("kbar").configured);
}
