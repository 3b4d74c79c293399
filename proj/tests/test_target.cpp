#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "vtmv/target.hpp"

using namespace vtmv;

namespace {

TargetCurve reference_target(double alpha = 0.5) {
    return TargetCurve(1.0, alpha, ScalarSchedule(0.40), ScalarSchedule(0.05));
}

TargetCurve piecewise_target() {
    return TargetCurve(2.0, 0.7, ScalarSchedule({0.0, 1.5, 4.0}, {0.3, 0.9, 0.2}),
                       ScalarSchedule({0.0, 2.0}, {0.05, 0.02}));
}

}  // namespace

TEST(Target, HExamples) {
    EXPECT_DOUBLE_EQ(reference_target().h_at(0.0), 1.5);
    // 0.5 e^{0.544} + e^{0.136}
    EXPECT_NEAR(reference_target().h_at(2.72), 2.0071242116003055, 1e-13);
    // 0.3 e^{0.2} + e^{0.05}
    EXPECT_NEAR(reference_target(0.3).h_at(1.0), 1.4176919238240750, 1e-13);
    EXPECT_THROW((void)reference_target().h_at(-0.1), DomainError);
}

TEST(Target, ThetaFromRawH) {
    const ScalarSchedule r(0.05);
    for (double alpha : {0.5, 0.3}) {
        const RealFunction h = [alpha](double s) { return alpha * std::exp(0.2 * s) + std::exp(0.05 * s); };
        const RealFunction hp = [alpha](double s) {
            return 0.2 * alpha * std::exp(0.2 * s) + 0.05 * std::exp(0.05 * s);
        };
        for (double s : {0.0, 1.0, 3.0, 10.0}) EXPECT_NEAR(theta_from_h(h, hp, r, s), 0.40, 1e-12);
    }
}

TEST(Target, ThetaFromHRejectsBondLevelTarget) {
    const ScalarSchedule r(0.05);
    const RealFunction h = [](double s) { return std::exp(0.05 * s); };
    const RealFunction hp = [](double s) { return 0.05 * std::exp(0.05 * s); };
    EXPECT_THROW((void)theta_from_h(h, hp, r, 1.0), AssumptionError);
}

TEST(Target, RoundTripAtSegmentMidpoints) {
    const TargetCurve tc = piecewise_target();
    const RealFunction h = [&](double s) { return tc.h_at(s); };
    const RealFunction hp = [&](double s) { return tc.h_prime(s); };
    for (double s : {0.75, 2.75, 7.0}) {
        EXPECT_NEAR(theta_from_h(h, hp, tc.market_r(), s), tc.theta_at(s), 1e-9);
    }
}

TEST(Target, ConversionFromRawHReproducesCurve) {
    const TargetCurve tc = piecewise_target();
    const RealFunction h = [&](double s) { return tc.h_at(s); };
    const RealFunction hp = [&](double s) { return tc.h_prime(s); };
    std::vector<double> bps{0.0, 1.5, 2.0, 4.0};

    const auto exact = target_from_h(tc.x(), h, hp, tc.market_r(), bps);
    EXPECT_FALSE(exact.report.derivative_approximated);
    EXPECT_TRUE(exact.report.ok());
    EXPECT_NEAR(exact.curve.alpha(), 0.7, 1e-14);
    for (double t : {0.3, 1.7, 3.0, 9.0}) EXPECT_NEAR(exact.curve.h_at(t), tc.h_at(t), 1e-9 * tc.h_at(t));

    const auto approx = target_from_h(tc.x(), h, std::nullopt, tc.market_r(), bps);
    EXPECT_TRUE(approx.report.derivative_approximated);
    EXPECT_FALSE(approx.report.notes.empty());
    for (double t : {0.75, 2.5, 5.0}) EXPECT_NEAR(approx.curve.theta_at(t), tc.theta_at(t), 1e-6);
}

TEST(Target, Validation) {
    EXPECT_TRUE(validate_target(reference_target()).ok());
    EXPECT_TRUE(validate_target(reference_target(0.0)).has(ViolationKind::TargetNotAboveBond));
    const TargetCurve negative(1.0, 0.5, ScalarSchedule({0.0, 2.0}, {0.4, -0.1}), ScalarSchedule(0.05));
    const auto report = validate_target(negative);
    ASSERT_TRUE(report.has(ViolationKind::NonPositiveThetaRate));
    EXPECT_EQ(report.violations.back().segment, 1u);
    EXPECT_TRUE(validate_target(TargetCurve(-1.0, 0.5, ScalarSchedule(0.4), ScalarSchedule(0.05)))
                    .has(ViolationKind::NonPositiveWealth));
}

TEST(Target, ExcessReturnDiscountIdentity) {
    const TargetCurve tc = piecewise_target();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 8.0);
    for (int trial = 0; trial < 100; ++trial) {
        double t1 = u(rng), t2 = u(rng);
        if (t1 > t2) std::swap(t1, t2);
        const double bond1 = tc.x() * std::exp(tc.market_r().integrate(0.0, t1, [](double v) { return v; }));
        const double bond2 = tc.x() * std::exp(tc.market_r().integrate(0.0, t2, [](double v) { return v; }));
        const double lhs = tc.wealth_at(t1) - bond1;
        const double rhs = (tc.wealth_at(t2) - bond2) * std::exp(-0.5 * tc.integral_theta(t1, t2));
        EXPECT_NEAR(lhs, rhs, 1e-10);
    }
}

TEST(Target, WealthTargetStrictlyIncreasing) {
    const TargetCurve tc = piecewise_target();
    double prev = tc.wealth_at(0.0);
    for (int k = 1; k <= 10000; ++k) {
        const double v = tc.wealth_at(k * 1e-3);
        ASSERT_GT(v, prev);
        prev = v;
    }
    EXPECT_GT(tc.log_growth_rate(1.0), 0.0);
}
