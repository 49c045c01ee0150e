#include "cavitydrag/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cavitydrag/quadrature.hpp"

namespace cavitydrag {

namespace {
constexpr double kPi = std::numbers::pi;
}

DragLaw DragLaw::make(const GasParams& gas, const BodyGeometry& body) {
    gas.validate();
    body.validate();
    DragLaw law;
    law.gas = gas;
    law.body = body;
    // d=3: 2 rho R^2 sqrt(pi beta); d=2: 4 rho R sqrt(beta/pi).
    law.a_const = recollision_prefactor(gas, body.radius) * transverse_mass(gas);
    return law;
}

double base_measure(const GasParams& gas, double radius) {
    return gas.dim == 3 ? kPi * radius * radius : 2.0 * radius;
}

double recollision_prefactor(const GasParams& gas, double radius) {
    return 2.0 * gas.rho * std::pow(gas.beta / kPi, 0.5 * gas.dim) * base_measure(gas, radius);
}

double transverse_mass(const GasParams& gas) {
    return gas.dim == 3 ? kPi / gas.beta : std::sqrt(kPi / gas.beta);
}

double transverse_weight(const GasParams& gas, double r) {
    if (std::isnan(r) || r < 0.0) throw Error("transverse cutoff must be >= 0");
    if (std::isinf(r)) return transverse_mass(gas);
    if (gas.dim == 3) return -(kPi / gas.beta) * std::expm1(-gas.beta * r * r);
    return std::sqrt(kPi / gas.beta) * std::erf(std::sqrt(gas.beta) * r);
}

// F0(V) = A [ V e^{-bV^2}/b + sqrt(pi/b) (V^2 + 1/(2b)) erf(sqrt(b) V) ]
double drag_f0(const DragLaw& law, double v) {
    const double b = law.gas.beta;
    const double e = std::exp(-b * v * v);
    const double g0 = std::sqrt(kPi / b);
    return law.a_const * (v * e / b + g0 * (v * v + 0.5 / b) * std::erf(std::sqrt(b) * v));
}

double drag_f0_prime(const DragLaw& law, double v) {
    const double b = law.gas.beta;
    const double e = std::exp(-b * v * v);
    const double g0 = std::sqrt(kPi / b);
    return 2.0 * law.a_const * (e / b + v * g0 * std::erf(std::sqrt(b) * v));
}

double drag_f0_second(const DragLaw& law, double v) {
    const double b = law.gas.beta;
    return 2.0 * law.a_const * std::sqrt(kPi / b) * std::erf(std::sqrt(b) * v);
}

double drag_f0_quadrature(const DragLaw& law, double v) {
    const double b = law.gas.beta;
    const double cut = 40.0 / std::sqrt(b);
    auto below = [&](double u) { return (u - v) * (u - v) * std::exp(-b * u * u); };
    double lo = 0.0, hi = 0.0;
    if (v > -cut) lo = integrate_adaptive(below, std::min(-cut, v), v, 1e-13);
    if (v < cut) hi = integrate_adaptive(below, v, std::max(cut, v), 1e-13);
    return law.a_const * (lo - hi);
}

double solve_limit_velocity(const DragLaw& law, double force) {
    if (!(force > 0.0) || !std::isfinite(force)) throw Error("force must be positive");
    double hi = 1.0;
    while (drag_f0(law, hi) <= force) {
        hi *= 2.0;
        if (hi > 1e12) throw Error("cannot bracket the limiting velocity");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (drag_f0(law, mid) < force)
            lo = mid;
        else
            hi = mid;
    }
    // pick the closer endpoint
    return std::abs(drag_f0(law, lo) - force) <= std::abs(drag_f0(law, hi) - force) ? lo : hi;
}

EquilibriumSummary limit_velocity(const DragLaw& law, double force) {
    EquilibriumSummary s;
    s.v_inf = solve_limit_velocity(law, force);
    s.v0 = law.body.v0;
    if (!(s.v0 < s.v_inf))
        throw Error("initial velocity must be below the limiting velocity");
    s.gamma = s.v_inf - s.v0;
    s.c_plus = drag_f0_prime(law, s.v0);
    s.c_minus = drag_f0_prime(law, s.v_inf);
    s.t0 = std::log(s.c_plus / s.gamma) / (2.0 * s.c_minus);
    return s;
}

double secant_slope(const DragLaw& law, double v_inf, double u) {
    if (u == 0.0) return drag_f0_prime(law, v_inf);
    const GaussRule& r = gauss_legendre(8);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double theta = 0.5 * (1.0 + r.x[i]);
        s += r.w[i] * drag_f0_prime(law, v_inf - theta * u);
    }
    return 0.5 * s;
}

}  // namespace cavitydrag
