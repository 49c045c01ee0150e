#include <gtest/gtest.h>

#include <cmath>

#include "cavitydrag/analysis.hpp"
#include "helpers.hpp"

using namespace cavitydrag;
using testing_helpers::exp_history;
using testing_helpers::from_function;

namespace {

EquilibriumSummary summary(double gamma, double c) {
    EquilibriumSummary s;
    s.v_inf = 0.07;
    s.v0 = s.v_inf - gamma;
    s.gamma = gamma;
    s.c_plus = c;
    s.c_minus = c;
    s.t0 = std::log(c / gamma) / (2.0 * c);
    return s;
}

VelocityHistory algebraic(double p, double amp, double T = 100.0, double dt = 0.01) {
    const double g = 0.01, c = 2.0;
    return from_function(
        [=](double t) { return g * std::exp(-c * t) + (t >= 1.0 ? amp * std::pow(t, -p) : amp * t); }, summary(g, c),
        T, dt);
}

}  // namespace

TEST(TailFit, RecoversCubicExponent) {
    const FitReport r = tail_exponent(algebraic(3.0, 1e-6), 50.0, 100.0);
    ASSERT_TRUE(r.fitted);
    EXPECT_NEAR(r.exponent, 3.0, 0.01);
    EXPECT_NEAR(r.coefficient, 1e-6, 1e-9);
    EXPECT_GT(r.r2, 0.999999);
    EXPECT_FALSE(r.shrunk);
    EXPECT_EQ(r.n_points, 5001u);
}

TEST(TailFit, OtherExponents) {
    for (double p : {1.5, 2.0, 4.0}) {
        const FitReport r = tail_exponent(algebraic(p, 1e-5), 50.0, 100.0);
        ASSERT_TRUE(r.fitted);
        EXPECT_NEAR(r.exponent, p, 1e-6);
    }
}

TEST(TailFit, PureExponentialIsRefused) {
    const FitReport r = tail_exponent(exp_history(0.01, 2.0, 100.0, 0.01), 50.0, 100.0);
    EXPECT_FALSE(r.fitted);
    EXPECT_TRUE(r.refused);
}

TEST(TailFit, ExponentialDominatedWindowIsRefused) {
    const FitReport r = tail_exponent(algebraic(3.0, 1e-12), 1.0, 2.0);
    EXPECT_TRUE(r.refused);
    EXPECT_NE(r.note.find("exponential"), std::string::npos);
}

TEST(TailFit, NoiseShrinksWindow) {
    // residual vanishes after t = 60
    const double g = 0.01, c = 0.05;
    const VelocityHistory h = from_function(
        [=](double t) { return g * std::exp(-c * t) + (t < 60.0 ? 1e-6 * t * std::pow(t + 1.0, -4.0) : 0.0); },
        summary(g, c), 100.0, 0.01);
    const FitReport r = tail_exponent(h, 40.0, 100.0);
    EXPECT_TRUE(r.shrunk);
    EXPECT_LT(r.t_hi, 60.0);
}

TEST(TailFit, BadWindow) {
    const VelocityHistory h = algebraic(3.0, 1e-6, 10.0);
    EXPECT_THROW(tail_exponent(h, 0.0, 5.0), Error);
    EXPECT_THROW(tail_exponent(h, 5.0, 4.0), Error);
    EXPECT_THROW(tail_exponent(h, 5.0, 20.0), Error);
}

TEST(FitWindowDefault, StartsPastHalfHorizon) {
    const VelocityHistory h = algebraic(3.0, 1e-6);
    const FitWindow w = default_fit_window(h, 0.0);
    EXPECT_TRUE(w.ok);
    EXPECT_GE(w.t_lo, 50.0);
    EXPECT_DOUBLE_EQ(w.t_hi, 100.0);
}

TEST(LowerBound, HoldsOnFloorAndFailsBelow) {
    const VelocityHistory h = exp_history(0.01, 2.0, 10.0, 0.01);
    FitReport r;
    verify_thm31(h, r);
    EXPECT_TRUE(r.lower_ok);
    const VelocityHistory below = from_function(
        [](double t) { return 0.01 * std::exp(-2.0 * t) * (t > 3.0 ? 0.99 : 1.0); }, summary(0.01, 2.0), 10.0,
        0.01);
    FitReport b;
    verify_thm31(below, b);
    EXPECT_FALSE(b.lower_ok);
    EXPECT_NEAR(below.time(b.lower_fail_index), 3.01, 1e-9);
}

TEST(SecondBound, FloorOnlyGivesNoAMinus) {
    const VelocityHistory h = exp_history(0.01, 2.0, 10.0, 0.01);
    FitReport r;
    verify_thm32(h, {}, r);
    EXPECT_EQ(r.a_minus_fit, 0.0);
    EXPECT_FALSE(r.thm32_ok);
}

TEST(SecondBound, AlgebraicTail) {
    const VelocityHistory h = algebraic(3.0, 1e-6);
    FitReport r;
    verify_thm32(h, {}, r);
    // residual t^3 / gamma^4 = 1e-6 / 1e-8 exactly, halved
    EXPECT_NEAR(r.a_minus_fit, 50.0, 1e-6);
    EXPECT_TRUE(r.thm32_ok);
    EXPECT_LT(r.t_bar, 1.0);
}

TEST(Convolution, MatchesClosedForm) {
    const double c = 1.7;
    std::vector<double> ts, g1, gs;
    for (int k = 0; k <= 400; ++k) {
        const double t = 0.025 * k * k / 20.0;  // uneven rows
        ts.push_back(t);
        g1.push_back(1.0);
        gs.push_back(t);
    }
    const auto a = exp_convolution(ts, g1, c);
    const auto b = exp_convolution(ts, gs, c);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double t = ts[k];
        EXPECT_NEAR(a[k], (1.0 - std::exp(-c * t)) / c, 1e-13);
        EXPECT_NEAR(b[k], t / c - (1.0 - std::exp(-c * t)) / (c * c), 1e-12);
    }
    EXPECT_THROW(exp_convolution({0.0, 1.0}, {1.0}, c), Error);
}

TEST(Convolution, SmallStepBranch) {
    const double c = 1e-3;
    std::vector<double> ts{0.0, 0.01, 0.02, 0.05}, g{0.0, 0.01, 0.02, 0.05};
    const auto b = exp_convolution(ts, g, c);
    const double t = 0.05;
    EXPECT_NEAR(b[3], t / c + std::expm1(-c * t) / (c * c), 2e-14);
}

TEST(Duhamel, ExactChainPasses) {
    // u' = -c u + r with r = const gives u = (g - r/c) e^{-ct} + r/c
    const double g = 0.01, c = 2.0, rr = 1e-4;
    const VelocityHistory h = from_function(
        [=](double t) { return (g - rr / c) * std::exp(-c * t) + rr / c; }, summary(g, c), 10.0, 0.01);
    std::vector<RecollisionBreakdown> table;
    for (int k = 0; k <= 100; ++k) {
        RecollisionBreakdown row;
        row.t = 0.1 * k;
        row.r_plus = rr;
        table.push_back(row);
    }
    FitReport r;
    verify_thm32(h, table, r);
    EXPECT_TRUE(r.duhamel_ok);
    EXPECT_NEAR(r.duhamel_worst, 0.0, 1e-12);
    for (auto& row : table) row.r_plus *= 1.5;
    verify_thm32(h, table, r);
    EXPECT_FALSE(r.duhamel_ok);
}

TEST(Envelope, RatioOfCubicForcing) {
    std::vector<RecollisionBreakdown> table;
    for (int k = 0; k <= 50; ++k) {
        RecollisionBreakdown row;
        row.t = k;
        row.r_plus = (k % 2 ? 2.0 : 1.0) / std::pow(1.0 + k, 3);
        table.push_back(row);
    }
    EXPECT_NEAR(r_plus_envelope_ratio(table, 10.0, 40.0), 2.0, 1e-12);
    table[20].r_plus = 0.0;
    EXPECT_TRUE(std::isinf(r_plus_envelope_ratio(table, 10.0, 40.0)));
}

TEST(Autonomous, MinimalAPlusIsTiny) {
    const DragLaw law = testing_helpers::law_with();
    const VelocityHistory a = autonomous_solve(law, testing_helpers::short_cfg(20.0));
    FitReport r;
    verify_thm31(a, r);
    EXPECT_TRUE(r.lower_ok);
    EXPECT_LT(r.a_plus_min, 1e-6);
    EXPECT_NE(fit_json(r).find("\"lower_ok\": true"), std::string::npos);
}
