#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hfd/lognum.hpp"

using namespace hfd;

namespace {

constexpr int kCases = 100000;

/// Order key for positive values computed from the raw fields: ln x while it
/// fits in a double, otherwise ln ln x in a higher bucket.
std::pair<int, double> order_key(const TowerScalar& x) {
    if (x.level() == 2 && x.mag() > 700.0) return {1, x.mag()};
    switch (x.level()) {
        case 0: return {0, std::log(x.mag())};
        case 1: return {0, x.mag()};
        default: return {0, std::exp(x.mag())};
    }
}

int oracle_compare_positive(const TowerScalar& a, const TowerScalar& b) {
    const auto ka = order_key(a), kb = order_key(b);
    if (ka < kb) return -1;
    if (kb < ka) return 1;
    return 0;
}

/// Random positive canonical value spread over the three levels.
TowerScalar random_positive(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    switch (rng() % 4) {
        case 0: return TowerScalar::normalize(1, 0, std::exp(-690.0 + 724.0 * U(rng)));
        case 1: return TowerScalar::normalize(1, 1, (U(rng) < 0.5 ? -1.0 : 1.0) * std::exp(std::log(35.0) + 31.0 * U(rng)));
        case 2: return TowerScalar::normalize(1, 2, 34.6 + 665.0 * U(rng));
        default: return TowerScalar::normalize(1, 2, std::exp(std::log(700.0) + 10.0 * U(rng)));
    }
}

bool canonical(const TowerScalar& x) {
    if (x.is_zero()) return x.level() == 0 && x.mag() == 0.0;
    switch (x.level()) {
        case 0: return x.mag() >= TowerScalar::kLevel0Min && x.mag() <= TowerScalar::kLevel0Max;
        case 1:
            return x.mag() <= TowerScalar::kLevel1Max &&
                   (x.mag() > TowerScalar::kLnLevel0Max || x.mag() < TowerScalar::kLnLevel0Min);
        default: return x.mag() > TowerScalar::kLnLevel1Max;
    }
}

}  // namespace

TEST(LognumExamples, NormalizeIdentityAndDemotion) {
    EXPECT_TRUE(TowerScalar::normalize(1, 0, 1.0).same_as(tw(1.0)));
    const TowerScalar one = TowerScalar::normalize(1, 1, 0.0);
    EXPECT_EQ(one.level(), 0);
    EXPECT_EQ(one.mag(), 1.0);
}

TEST(LognumExamples, NormalizePromotion) {
    const TowerScalar x = TowerScalar::normalize(1, 1, 1e200);
    EXPECT_EQ(x.level(), 2);
    EXPECT_NEAR(x.mag(), 200.0 * std::log(10.0), 1e-12);
    EXPECT_NEAR(x.mag(), 460.517, 1e-3);
}

TEST(LognumExamples, MulOfLogLevelValues) {
    // exp(1e200) * exp(1e200) = exp(2e200); canonical form is level 2
    const TowerScalar a = TowerScalar::normalize(1, 1, 1e200);
    const TowerScalar p = a * a;
    EXPECT_EQ(p.level(), 2);
    EXPECT_NEAR(p.mag(), std::log(2e200), 1e-12 * std::log(2e200));
}

TEST(LognumExamples, AddLevelZeroExact) {
    EXPECT_TRUE((tw(3.0) + tw(4.0)).same_as(tw(7.0)));
}

TEST(LognumExamples, PowDoubleExponential) {
    // (exp(1e300))^(e^690): ln ln = 690 + ln(1e300)
    const TowerScalar base = TowerScalar::normalize(1, 1, 1e300);
    const TowerScalar expo = TowerScalar::normalize(1, 1, 690.0);
    const TowerScalar r = combine(Op::Pow, base, expo);
    EXPECT_EQ(r.level(), 2);
    EXPECT_NEAR(r.mag(), 690.0 + 300.0 * std::log(10.0), 1e-9);
}

TEST(LognumExamples, CompareAcrossLevels) {
    EXPECT_LT(compare(tw(5.0), TowerScalar::normalize(1, 1, 100.0)), 0);
    EXPECT_LT(compare(TowerScalar::normalize(-1, 1, 50.0), tw(0.001)), 0);
    EXPECT_LT(compare(TowerScalar::normalize(1, 2, 10.0), TowerScalar::normalize(1, 1, 1e300)), 0);
}

TEST(LognumErrors, OverflowAndDomain) {
    EXPECT_THROW(TowerScalar::normalize(1, 3, 1.0), DomainError);
    EXPECT_THROW(TowerScalar::normalize(1, 0, NAN), DomainError);
    EXPECT_THROW(tower_exp(TowerScalar::normalize(1, 2, 800.0)), OverflowError);
    EXPECT_THROW(tower_pow(tw(-2.0), tw(0.5)), DomainError);
    EXPECT_THROW(tower_log(tw(-1.0)), DomainError);
    EXPECT_NEAR(tower_pow(tw(-2.0), tw(3.0)).to_double(), -8.0, 1e-14);
}

TEST(LognumErrors, ZeroIsCanonical) {
    const TowerScalar z = TowerScalar::normalize(0, 2, 5.0);
    EXPECT_TRUE(z.is_zero());
    EXPECT_EQ(z.level(), 0);
    EXPECT_EQ(z.mag(), 0.0);
    EXPECT_TRUE((tw(2.5) - tw(2.5)).is_zero());
}

TEST(LognumProperty, RoundTripExpLog) {
    std::mt19937_64 rng(101);
    int checked = 0;
    for (int i = 0; i < kCases; ++i) {
        const TowerScalar x = random_positive(rng);
        const TowerScalar y = tower_exp(tower_log(x));
        ASSERT_EQ(y.level(), x.level()) << to_string(x);
        ASSERT_LE(std::abs(y.mag() - x.mag()), 1e-12 * std::abs(x.mag())) << to_string(x);
        ++checked;
    }
    EXPECT_EQ(checked, kCases);
}

TEST(LognumProperty, RoundTripDouble) {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> U(-300.0, 300.0);
    for (int i = 0; i < kCases; ++i) {
        const double x = (rng() % 2 ? 1.0 : -1.0) * std::pow(10.0, U(rng));
        const TowerScalar t = tw(x);
        ASSERT_LE(std::abs(t.to_double() - x), 1e-13 * std::abs(x)) << x;
        ASSERT_TRUE(TowerScalar::normalize(t.sign(), t.level(), t.mag()).same_as(t));
    }
}

TEST(LognumProperty, CompareMatchesOracle) {
    std::mt19937_64 rng(103);
    for (int i = 0; i < kCases; ++i) {
        const TowerScalar a = random_positive(rng), b = random_positive(rng);
        ASSERT_EQ(compare(a, b), oracle_compare_positive(a, b)) << to_string(a) << " vs " << to_string(b);
        ASSERT_EQ(compare(-a, -b), -oracle_compare_positive(a, b));
        ASSERT_LT(compare(-a, b), 0);
        ASSERT_GT(compare(a, TowerScalar::zero()), 0);
    }
}

TEST(LognumProperty, MulIsMonotone) {
    std::mt19937_64 rng(104);
    int strict_checked = 0;
    for (int i = 0; i < kCases; ++i) {
        TowerScalar x = random_positive(rng), y = random_positive(rng);
        if (compare(x, y) == 0) continue;
        if (x > y) std::swap(x, y);
        TowerScalar z = random_positive(rng);
        // keep the product inside level 2
        if (z.level() == 2 && z.mag() > 700.0) z = TowerScalar::normalize(1, 2, 100.0);
        TowerScalar xz, yz;
        try {
            xz = x * z;
            yz = y * z;
        } catch (const OverflowError&) {
            continue;
        }
        ASSERT_LE(compare(xz, yz), 0) << to_string(x) << " " << to_string(y) << " " << to_string(z);
        // strict whenever the gap between ln x and ln y survives rounding of ln(x z)
        const double lx = x.log_abs(), ly = y.log_abs(), lz = z.log_abs();
        if (std::isfinite(lx) && std::isfinite(ly) && std::isfinite(lz) &&
            ly - lx > 1e-9 * std::max({1.0, std::abs(lx), std::abs(ly), std::abs(lz)})) {
            ASSERT_LT(compare(xz, yz), 0) << to_string(x) << " " << to_string(y) << " " << to_string(z);
            ++strict_checked;
        }
    }
    EXPECT_GT(strict_checked, kCases / 4);
}

TEST(LognumProperty, NormalizeIsCanonicalAndIdempotent) {
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < kCases; ++i) {
        const int level = static_cast<int>(rng() % 3);
        const int sign = rng() % 2 ? 1 : -1;
        double mag = 0.0;
        switch (level) {
            case 0: mag = std::pow(10.0, -300.0 + 600.0 * U(rng)); break;
            case 1: mag = (U(rng) < 0.3 ? -1.0 : 1.0) * std::pow(10.0, -3.0 + 300.0 * U(rng)); break;
            default: mag = -5.0 + 705.0 * U(rng); break;
        }
        const TowerScalar x = TowerScalar::normalize(sign, level, mag);
        ASSERT_TRUE(canonical(x)) << level << " " << mag << " -> " << to_string(x);
        ASSERT_TRUE(TowerScalar::normalize(x.sign(), x.level(), x.mag()).same_as(x));
        ASSERT_EQ(x.sign(), sign);
        ASSERT_GE(x.level(), 0);
        // value preserved: compare ln|x| (or ln ln|x|) with the input
        if (level == 0) {
            ASSERT_NEAR(x.log_abs(), std::log(mag), 1e-12 * std::max(1.0, std::abs(std::log(mag))));
        } else if (level == 1) {
            if (x.level() == 2)
                ASSERT_NEAR(x.mag(), std::log(mag), 1e-13 * std::log(mag));
            else
                ASSERT_NEAR(x.log_abs(), mag, 1e-12 * std::max(1.0, std::abs(mag)));
        } else if (x.level() == 2) {
            ASSERT_EQ(x.mag(), mag);
        } else {
            ASSERT_NEAR(x.log_abs(), std::exp(mag), 1e-12 * std::max(1.0, std::exp(mag)));
        }
    }
}

TEST(LognumProperty, PromotionThroughArithmetic) {
    std::mt19937_64 rng(106);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < kCases; ++i) {
        // products of two level-0 values above 1e7.5 leave level 0
        const double a = std::pow(10.0, 7.6 + 7.3 * U(rng)), b = std::pow(10.0, 7.6 + 7.3 * U(rng));
        const TowerScalar p = tw(a) * tw(b);
        ASSERT_TRUE(canonical(p));
        ASSERT_EQ(p.level(), 1);
        ASSERT_NEAR(p.mag(), std::log(a) + std::log(b), 1e-13 * (std::log(a) + std::log(b)));
        // exponentials of level-1 values above ln(1e15) land on level 2
        const TowerScalar e = tower_exp(TowerScalar::from_log(35.0 + 600.0 * U(rng)));
        ASSERT_TRUE(canonical(e));
        ASSERT_EQ(e.level(), 2);
    }
}

TEST(LognumProperty, AddCommutativeAssociative) {
    std::mt19937_64 rng(107);
    for (int i = 0; i < kCases / 4; ++i) {
        TowerScalar a = random_positive(rng), b = random_positive(rng), c = random_positive(rng);
        for (TowerScalar* v : {&a, &b, &c})
            if (v->level() == 2 && v->mag() > 700.0) *v = TowerScalar::normalize(1, 2, 50.0);
        ASSERT_TRUE((a + b).same_as(b + a));
        ASSERT_TRUE((a * b).same_as(b * a));
        const TowerScalar l = (a + b) + c, r = a + (b + c);
        const double ll = tower_log(l).to_double(), lr = tower_log(r).to_double();
        ASSERT_LE(std::abs(ll - lr), 1e-12 * std::max(1.0, std::abs(ll))) << to_string(a) << to_string(b) << to_string(c);
    }
}

TEST(LognumProperty, AddOfWidelySeparatedIsMaxBitExact) {
    std::mt19937_64 rng(108);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < kCases / 4; ++i) {
        const double la = 40.0 + 600.0 * U(rng);
        const TowerScalar a = TowerScalar::from_log(la);
        const TowerScalar b = TowerScalar::from_log(la - 50.0 - 100.0 * U(rng));
        ASSERT_TRUE((a + b).same_as(a));
        ASSERT_TRUE((b + a).same_as(a));
    }
}

TEST(LognumProperty, CancellationIsFlagged) {
    const TowerScalar a = TowerScalar::from_log(1e10);
    const AddResult r = add_checked(a, -a);
    EXPECT_TRUE(r.approximate_zero);
    EXPECT_TRUE(r.value.is_zero());
    EXPECT_GT(r.error_bound.sign(), 0);
}
