#pragma once

#include "cavitydrag/core_model.hpp"

namespace cavitydrag {

struct DragLaw {
    GasParams gas;
    BodyGeometry body;
    double a_const = 0.0;

    // Validates both parameter sets and computes a_const.
    static DragLaw make(const GasParams& gas, const BodyGeometry& body);
};

struct EquilibriumSummary {
    double v_inf = 0.0;
    double v0 = 0.0;
    double c_plus = 0.0;   // F0'(V0)
    double c_minus = 0.0;  // F0'(V_inf)
    double gamma = 0.0;    // V_inf - V0
    double t0 = 0.0;       // log(C+/gamma)/(2 C-)
};

// Measure of the base: pi R^2 (d=3) or 2R (d=2).
double base_measure(const GasParams& gas, double radius);

// 2 rho (beta/pi)^{d/2} |base|, the factor in front of the velocity integrals.
double recollision_prefactor(const GasParams& gas, double radius);

// Gaussian mass of {|v_perp| <= r}; r may be +infinity.
double transverse_weight(const GasParams& gas, double r);

// Full transverse mass, transverse_weight(gas, inf).
double transverse_mass(const GasParams& gas);

double drag_f0(const DragLaw& law, double v);
double drag_f0_prime(const DragLaw& law, double v);
double drag_f0_second(const DragLaw& law, double v);

// Direct quadrature of the defining integral; slow, for cross-checks only.
double drag_f0_quadrature(const DragLaw& law, double v);

// Root of F0(V) = E by bisection (bracket doubled from 1).
double solve_limit_velocity(const DragLaw& law, double force);

// V_inf for force E plus the derived constants. V0 is taken from law.body.
EquilibriumSummary limit_velocity(const DragLaw& law, double force);

// (F0(V_inf) - F0(V_inf - u))/u computed as the mean of F0' over the
// segment, so it stays accurate when u is tiny. u = 0 gives F0'(V_inf).
double secant_slope(const DragLaw& law, double v_inf, double u);

}  // namespace cavitydrag
