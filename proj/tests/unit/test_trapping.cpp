#include <gtest/gtest.h>

#include <cmath>

#include "cavitydrag/trapping.hpp"
#include "helpers.hpp"

using namespace cavitydrag;
using testing_helpers::exp_history;

namespace {

// d(s,t,tau) for u = g e^{-c tau} in closed form
double d_exact(double g, double c, double s, double t, double tau) {
    auto I = [&](double a, double b) { return g * (std::exp(-c * a) - std::exp(-c * b)) / c; };
    return I(s, tau) - (tau - s) * I(s, t) / (t - s);
}

double bisect(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST(Trapping, DistanceBookends) {
    const VelocityHistory h = exp_history(0.01, 2.0, 10.0, 0.01);
    for (auto [s, t] : {std::pair{0.0, 1.0}, {0.37, 4.2}, {3.0, 9.99}}) {
        EXPECT_EQ(distance_d(h, s, t, s), 0.0);
        EXPECT_EQ(distance_d(h, s, t, t), 0.0);
        for (double q : {0.2, 0.5, 0.8}) {
            const double tau = s + q * (t - s);
            EXPECT_LE(distance_d(h, s, t, tau), aux_f(h, s));
            EXPECT_GT(distance_d(h, s, t, tau), 0.0);
        }
    }
    EXPECT_THROW(distance_d(h, 1.0, 2.0, 2.5), Error);
}

TEST(Trapping, DistanceVanishesForConstantVelocity) {
    EquilibriumSummary s;
    s.v_inf = 0.07;
    s.v0 = 0.06;
    s.gamma = 0.01;
    s.c_plus = s.c_minus = 2.0;
    const VelocityHistory h = testing_helpers::from_function([](double) { return 0.003; }, s, 5.0, 0.01);
    for (double tau : {1.1, 2.5, 3.9}) EXPECT_NEAR(distance_d(h, 1.0, 4.0, tau), 0.0, 1e-17);
}

TEST(Trapping, AuxFClosedForm) {
    const double g = 0.01, c = 2.0;
    const VelocityHistory h = exp_history(g, c, 10.0, 1e-4);
    for (double s : {0.0, 0.5, 3.0, 9.0, 12.0}) EXPECT_NEAR(aux_f(h, s), g / c * std::exp(-c * s), 1e-8 * g / c);
    EXPECT_NEAR(aux_g(h, 0.5, 2.0), g / c * (std::exp(-c * 0.5) - std::exp(-c * 2.0)), 1e-10);
    EXPECT_NEAR(aux_g(h, 0.5, INFINITY), aux_f(h, 0.5), 1e-18);
}

TEST(Trapping, AuxFDecreasing) {
    const VelocityHistory h = exp_history(0.01, 2.0, 10.0, 0.01);
    const double f0 = aux_f(h, 0.0);
    const double e = 1e-3;
    for (double s : {0.2, 1.0, 4.0}) {
        EXPECT_LT(aux_f(h, s), f0);
        const double fd = (aux_f(h, s + e) - aux_f(h, s - e)) / (2.0 * e);
        EXPECT_LT(fd, 0.0);
        EXPECT_NEAR(fd / (-h.deficit_at(s)), 1.0, 1e-4);
    }
}

TEST(Trapping, SStarClosedForm) {
    const double g = 0.01, c = 2.0;
    const VelocityHistory h = exp_history(g, c, 20.0, 1e-4);
    for (double hb : {1e-3, 1e-4, 1e-6}) {
        const TrappingSummary r = solve_s_star(h, hb);
        ASSERT_TRUE(r.has_s_star);
        EXPECT_NEAR(r.s_star, std::log(g / (c * hb)) / c, 1e-6);
        EXPECT_NEAR(r.s_minus, r.s_star, 1e-6);  // C- = c here
        EXPECT_DOUBLE_EQ(r.theta_gamma, hb / g);
    }
}

TEST(Trapping, NoStarAboveF0) {
    const VelocityHistory h = exp_history(0.01, 2.0, 10.0, 0.01);
    const double f0 = aux_f(h, 0.0);
    for (double hb : {f0, 1.5 * f0}) {
        const TrappingSummary r = solve_s_star(h, hb);
        EXPECT_FALSE(r.has_s_star);
        for (double s : {0.0, 0.5, 2.0})
            for (double t : {s + 0.1, s + 3.0}) EXPECT_TRUE(escape_intervals(h, s, t, hb).intervals.empty());
    }
    EXPECT_THROW(solve_s_star(h, -1.0), Error);
}

TEST(Trapping, SStarGrowsAsBarrierShrinks) {
    const VelocityHistory h = exp_history(0.01, 2.0, 10.0, 0.01);
    double prev = 0.0;
    for (double hb : {4e-3, 1e-3, 1e-4, 1e-6, 1e-9}) {
        const double s = solve_s_star(h, hb).s_star;
        EXPECT_GT(s, prev);
        prev = s;
    }
}

TEST(Trapping, BoundsOnAutonomousEnvelope) {
    const DragLaw law = testing_helpers::law_with();
    const VelocityHistory a = autonomous_solve(law, testing_helpers::short_cfg(20.0));
    const double f0 = aux_f(a, 0.0);
    for (double frac : {0.9, 0.5, 0.1, 0.01}) {
        const TrappingSummary r = solve_s_star(a, frac * f0);
        ASSERT_TRUE(r.has_s_star);
        EXPECT_LE(r.s_minus, r.s_star + a.dt());
        EXPECT_LE(r.s_star, r.s_plus + a.dt());
        EXPECT_GT(r.fitted_c, 0.0);
    }
}

TEST(Trapping, ZeroBarrierEscapesEverywhere) {
    const VelocityHistory h = exp_history(0.01, 2.0, 10.0, 0.01);
    const EscapeProfile p = escape_intervals(h, 0.5, 3.0, 0.0);
    ASSERT_EQ(p.intervals.size(), 1u);
    EXPECT_NEAR(p.intervals[0].a, 0.5, 1e-9);
    EXPECT_NEAR(p.intervals[0].b, 3.0, 1e-9);
    EXPECT_NEAR(p.delta_max, 2.5, 1e-9);
    EXPECT_NEAR(escape_delta(h, 0.5, 3.0, 0.0), 2.5, 1e-9);
}

TEST(Trapping, NoEscapePastSStar) {
    const DragLaw law = testing_helpers::law_with();
    const VelocityHistory a = autonomous_solve(law, testing_helpers::short_cfg(20.0));
    const double hb = 0.5 * aux_f(a, 0.0);
    const double ss = solve_s_star(a, hb).s_star;
    for (double s : {ss + 0.01, ss + 0.5, 3.0})
        for (double t : {s + 0.05, s + 1.0, 19.0}) {
            const EscapeProfile p = escape_intervals(a, s, t, hb);
            EXPECT_TRUE(p.intervals.empty());
            EXPECT_EQ(p.delta_max, 0.0);
        }
    EXPECT_GT(escape_delta(a, 0.0, 5.0, hb), 0.0);
}

TEST(Trapping, ShortIntervalNearTheTop) {
    const double g = 0.01, c = 2.0, s = 0.5, t = 3.0;
    const VelocityHistory h = exp_history(g, c, 10.0, 1e-3);
    // top of d where u = ubar
    const double ubar = g * (std::exp(-c * s) - std::exp(-c * t)) / (c * (t - s));
    const double tm = -std::log(ubar / g) / c;
    const double top = d_exact(g, c, s, t, tm);
    const double hb = 0.95 * top;
    auto f = [&](double tau) { return d_exact(g, c, s, t, tau) - hb; };
    const double a = bisect(f, s, tm), b = bisect(f, tm, t);
    const EscapeProfile p = escape_intervals(h, s, t, hb);
    ASSERT_EQ(p.intervals.size(), 1u);
    EXPECT_NEAR(p.intervals[0].a, a, 1e-4);
    EXPECT_NEAR(p.intervals[0].b, b, 1e-4);
    EXPECT_LT(p.intervals[0].a, tm);
    EXPECT_GT(p.intervals[0].b, tm);
    EXPECT_NEAR(p.delta_max, b - a, 2e-4);
}

TEST(Trapping, MonotoneInBarrier) {
    const DragLaw law = testing_helpers::law_with();
    const VelocityHistory a = autonomous_solve(law, testing_helpers::short_cfg(10.0));
    const double f0 = aux_f(a, 0.0);
    for (auto [s, t] : {std::pair{0.0, 2.0}, {0.01, 8.0}, {0.05, 0.5}}) {
        double prev = INFINITY;
        for (double frac : {0.0, 0.1, 0.3, 0.6, 0.9}) {
            const double d = escape_delta(a, s, t, frac * f0);
            EXPECT_LE(d, prev + 1e-12);
            prev = d;
        }
    }
}
