#pragma once

#include <vector>

#include "cavitydrag/history.hpp"

namespace cavitydrag {

struct EscapeInterval {
    double a = 0.0;
    double b = 0.0;
};

struct EscapeProfile {
    double s = 0.0;
    double t = 0.0;
    std::vector<EscapeInterval> intervals;
    double delta_max = 0.0;
};

struct TrappingSummary {
    double barrier = 0.0;
    double f0_total = 0.0;
    bool has_s_star = false;
    // +inf when barrier = 0 (nobody is ever trapped)
    double s_star = 0.0;
    double s_minus = 0.0;
    double s_plus = 0.0;
    double theta_gamma = 0.0;
    double alpha = 3.0;
    double fitted_c = 0.0;  // max f(s)(1+s)^{alpha-1}/gamma on the grid
    // width of the bracket on the part of f beyond the horizon
    double tail_remainder = 0.0;
};

// d(s,t,tau) = int_s^tau (Wbar_{s,t} - W) = int_s^tau u - (tau-s) ubar_{s,t}
double distance_d(const VelocityHistory& h, double s, double t, double tau);

// g(s,tau) = int_s^tau (V_inf - W); tau = +inf allowed.
double aux_g(const VelocityHistory& h, double s, double tau);

// f(s) = g(s, inf): grid integral plus the envelope integral past the horizon.
double aux_f(const VelocityHistory& h, double s);

TrappingSummary solve_s_star(const VelocityHistory& h, double barrier, double alpha = 3.0);

// Sub-intervals of (s,t) where d(s,t,.) exceeds the barrier.
EscapeProfile escape_intervals(const VelocityHistory& h, double s, double t, double barrier);

// delta_max of escape_intervals without building the list.
double escape_delta(const VelocityHistory& h, double s, double t, double barrier);

}  // namespace cavitydrag
