#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "helpers.hpp"

using namespace cavitydrag;
using testing_helpers::exp_history;
using testing_helpers::from_function;

namespace {

EquilibriumSummary summary(double v_inf, double gamma, double c) {
    EquilibriumSummary s;
    s.v_inf = v_inf;
    s.v0 = v_inf - gamma;
    s.gamma = gamma;
    s.c_plus = c;
    s.c_minus = c;
    s.t0 = std::log(c / gamma) / (2.0 * c);
    return s;
}

}  // namespace

TEST(History, ValueAtNodesAndMidpoints) {
    const VelocityHistory h = exp_history(0.01, 2.0, 5.0, 0.01);
    for (std::size_t i : {0u, 17u, 250u, 500u}) EXPECT_EQ(h.value_at(h.time(i)), h.velocity(i));
    const double mid = 0.5 * (h.time(10) + h.time(11));
    EXPECT_NEAR(h.value_at(mid), 0.5 * (h.velocity(10) + h.velocity(11)), 1e-17);
    EXPECT_THROW(h.value_at(5.5), Error);
    EXPECT_THROW(h.value_at(-0.1), Error);
}

TEST(History, ConstantHistory) {
    const EquilibriumSummary s = summary(0.07, 0.01, 2.0);
    const VelocityHistory h = from_function([](double) { return 0.004; }, s, 3.0, 0.01);
    EXPECT_DOUBLE_EQ(h.value_at(1.234), 0.066);
    EXPECT_NEAR(h.window_mean(0.3, 2.9), 0.066, 1e-16);
}

TEST(History, WindowMeanClosedForm) {
    const double g = 0.01, c = 2.0, vinf = 0.07;
    // fine grid so the trapezoid error stays below the tolerance
    const VelocityHistory h = exp_history(g, c, 10.0, 1e-4, vinf);
    for (auto [s, t] : {std::pair{0.0, 1.0}, {0.5, 3.0}, {2.0, 9.5}, {0.0, 10.0}}) {
        const double exact = vinf - g * (std::exp(-c * s) - std::exp(-c * t)) / (c * (t - s));
        EXPECT_NEAR(h.window_mean(s, t), exact, 1e-10);
    }
    EXPECT_THROW(h.window_mean(2.0, 2.0), Error);
}

TEST(History, DeficitIntegralKeepsRelativeAccuracy) {
    // far tail values ~1e-40: the deficit form has to keep every digit
    const double g = 0.01, c = 1.0;
    const VelocityHistory h = exp_history(g, c, 100.0, 1e-3);
    const double s = 90.0, t = 95.0;
    const double exact = g * (std::exp(-c * s) - std::exp(-c * t)) / c;
    // trapezoid error c^2 dt^2 / 12 relative
    EXPECT_NEAR(h.integral(s, t) / exact - 1.0, 0.0, 1e-7);
}

TEST(History, AffineIsExact) {
    const EquilibriumSummary s = summary(1.0, 0.5, 1.0);
    const VelocityHistory h = from_function([](double t) { return 0.5 - 0.1 * t; }, s, 4.0, 0.01);
    EXPECT_NEAR(h.value_at(1.2345), 1.0 - (0.5 - 0.1 * 1.2345), 1e-14);
    // mean of 0.5 + 0.1 t over [s, t]
    EXPECT_NEAR(h.window_mean(0.33, 3.71), 0.5 + 0.1 * 0.5 * (0.33 + 3.71), 1e-14);
}

TEST(History, PrefixConsistency) {
    const VelocityHistory h = exp_history(0.01, 3.0, 20.0, 0.01);
    double trap = 0.0;
    for (std::size_t i = 1; i < h.size(); ++i) trap += 0.5 * h.dt() * (h.velocity(i - 1) + h.velocity(i));
    const double T = h.horizon();
    EXPECT_NEAR(h.window_mean(0.0, T) * T / trap - 1.0, 0.0, 1e-12);
}

TEST(History, MeanAboveGlobalMeanInClass) {
    const VelocityHistory h = exp_history(0.01, 2.0, 10.0, 0.01);
    for (double t : {1.0, 4.0, 9.0})
        for (double s : {0.1 * t, 0.5 * t, 0.9 * t}) EXPECT_GT(h.window_mean(s, t), h.window_mean(0.0, t));
}

TEST(Omega, EqualityCaseOfLowerBound) {
    const VelocityHistory h = exp_history(0.01, 2.0, 10.0, 0.01);
    const OmegaReport r = omega_check(h, 3.0, 0.0);
    EXPECT_TRUE(r.ok_lower);
    EXPECT_TRUE(r.ok_upper);
    EXPECT_NEAR(r.worst_margin, 0.0, 1e-12);
}

TEST(Omega, ConstantVelocityFailsLowerBound) {
    // W stuck at V0: the deficit gamma never decays, so the ceiling fails;
    // W stuck near V_inf fails the floor
    const EquilibriumSummary s = summary(0.07, 0.01, 2.0);
    const VelocityHistory stuck = from_function([](double) { return 1e-6; }, s, 10.0, 0.01);
    const OmegaReport r = omega_check(stuck, 3.0, 1.0);
    EXPECT_FALSE(r.ok_lower);
    EXPECT_GT(r.n_lower_fail, 0u);
}

TEST(Omega, RejectsAlpha) {
    const VelocityHistory h = exp_history(0.01, 2.0, 1.0, 0.01);
    EXPECT_THROW(omega_check(h, 1.0, 0.0), Error);
}

TEST(Omega, MinimalAPlusIsTight) {
    // deficit above the exponential ceiling by a t^-3 bump
    EquilibriumSummary s = summary(0.07, 0.01, 2.0);
    const double g = 0.01;
    const VelocityHistory h = from_function(
        [&](double t) { return std::min(g, g * std::exp(-2.0 * t) + 1e-9 / std::pow(1.0 + t, 3)); }, s, 50.0, 0.01);
    const double a = minimal_a_plus(h, 3.0);
    EXPECT_NEAR(a * g * g * g, 1e-9, 1e-12);
    EXPECT_TRUE(omega_check(h, 3.0, a * (1.0 + 1e-9)).ok_upper);
    EXPECT_FALSE(omega_check(h, 3.0, 0.9 * a).ok_upper);
}

TEST(WindowMeanBounds, ExponentialHistory) {
    const VelocityHistory h = exp_history(0.01, 2.0, 20.0, 0.01);
    const Lemma31Report r = lemma31_check(h, 100, 100);
    EXPECT_EQ(r.n_pairs, 10000u);
    EXPECT_TRUE(r.ok_a());
    EXPECT_TRUE(r.ok_b());
    EXPECT_TRUE(r.ok_c());
    EXPECT_EQ(r.fail_identity, 0u);
    EXPECT_GT(r.fitted_c, 0.0);
}

TEST(WindowMeanBounds, ConstantFailsStrictInequality) {
    const EquilibriumSummary s = summary(0.07, 0.01, 2.0);
    const VelocityHistory h = from_function([](double) { return 0.005; }, s, 5.0, 0.01);
    const Lemma31Report r = lemma31_check(h, 20, 20);
    EXPECT_FALSE(r.ok_a());
}

TEST(WindowMeanBounds, SplitIdentity) {
    const VelocityHistory h = exp_history(0.01, 2.0, 10.0, 0.01);
    for (double t : {2.0, 7.0})
        for (double s : {0.3, 1.1}) {
            const double lhs = h.window_mean(s, t) - h.window_mean(0.0, t);
            const double rhs = s / (t - s) * (h.window_mean(0.0, t) - h.window_mean(0.0, s));
            EXPECT_NEAR(lhs, rhs, 1e-15);
        }
}

TEST(History, CsvFormat) {
    const VelocityHistory h = exp_history(0.01, 2.0, 0.02, 0.01);
    const std::string csv = history_csv(h);
    EXPECT_EQ(csv.substr(0, 4), "t,W\n");
    char row[64];
    std::snprintf(row, sizeof row, "0,%.17g\n", h.velocity(0));
    EXPECT_EQ(csv.substr(4, std::string(row).size()), row);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}
