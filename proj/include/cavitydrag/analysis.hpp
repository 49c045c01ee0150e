#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cavitydrag/history.hpp"
#include "cavitydrag/recollision.hpp"

namespace cavitydrag {

struct FitReport {
    // tail fit of (V_inf - V) - gamma e^{-C- t} ~ C / t^p
    double exponent = 0.0;
    double exponent_ci = 0.0;  // half width of the 95% band (indicative)
    double coefficient = 0.0;  // C
    double r2 = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t n_points = 0;
    bool fitted = false;
    bool refused = false;
    bool shrunk = false;       // window cut back because of the noise floor
    std::string note;

    // upper and lower bounds of the first theorem
    bool lower_ok = false;
    std::size_t lower_fail_index = 0;
    double a_plus_min = 0.0;

    // lower bound of the second theorem
    bool thm32_ok = false;
    double a_minus_fit = 0.0;
    double t_bar = 0.0;
    double c_r_plus = 0.0;        // min r+ t^3 / gamma^4 past t_bar
    bool duhamel_ok = false;
    double duhamel_worst = 0.0;   // min over nodes of (V_inf - V)/(floor + chain) - 1
};

// Window for the fit: [max(T/2, 5 s+, exponential-dominance time), T].
// s+ enters only when it is finite.
struct FitWindow {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double s_plus = 0.0;
    bool ok = false;
};
FitWindow default_fit_window(const VelocityHistory& h, double barrier);

FitReport tail_exponent(const VelocityHistory& h, double t_lo, double t_hi);

// Lower bound gamma e^{-C- t} at every node plus the minimal A+.
void verify_thm31(const VelocityHistory& h, FitReport& rep);

// Largest A- on the second half of the grid, halved, then the smallest t_bar
// for which that A- holds; plus the Duhamel chain lower bound.
void verify_thm32(const VelocityHistory& h, const std::vector<RecollisionBreakdown>& table,
                  FitReport& rep, double chain_tol = 1e-6);

// int_0^t e^{-c(t-s)} g(s) ds at the table times, g linear between rows.
std::vector<double> exp_convolution(const std::vector<double>& times, const std::vector<double>& g, double c);

// max/min of r+(t)(1+t)^3 over rows with t in [t_lo, t_hi]
double r_plus_envelope_ratio(const std::vector<RecollisionBreakdown>& table, double t_lo, double t_hi);

std::string fit_json(const FitReport& r);
std::string fit_summary(const FitReport& r);

}  // namespace cavitydrag
