#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "cavitydrag/dynamics.hpp"
#include "cavitydrag/equilibrium.hpp"
#include "cavitydrag/history.hpp"

namespace testing_helpers {

using namespace cavitydrag;

inline DragLaw law_with(int dim = 3, double barrier = 0.0, double gamma = 0.01) {
    GasParams g{1.0, 1.0, dim};
    BodyGeometry b;
    b.radius = 1.0;
    b.force = 0.5;
    const double vinf = solve_limit_velocity(DragLaw::make(g, b), b.force);
    b.v0 = vinf - gamma;
    b.barrier = barrier;
    return DragLaw::make(g, b);
}

// u(t) = gamma e^{-c t}, C+ = C- = c, no algebraic tail
inline VelocityHistory exp_history(double gamma, double c, double T, double dt, double v_inf = 0.07) {
    EquilibriumSummary s;
    s.v_inf = v_inf;
    s.v0 = v_inf - gamma;
    s.gamma = gamma;
    s.c_plus = c;
    s.c_minus = c;
    s.t0 = std::log(c / gamma) / (2.0 * c);
    const auto n = static_cast<std::size_t>(std::llround(T / dt));
    std::vector<double> u(n + 1);
    for (std::size_t i = 0; i <= n; ++i) u[i] = gamma * std::exp(-c * dt * static_cast<double>(i));
    return VelocityHistory(dt, std::move(u), s);
}

inline VelocityHistory from_function(const std::function<double(double)>& u, const EquilibriumSummary& s, double T,
                                     double dt) {
    const auto n = static_cast<std::size_t>(std::llround(T / dt));
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) v[i] = u(dt * static_cast<double>(i));
    return VelocityHistory(dt, std::move(v), s);
}

inline MapConfig short_cfg(double horizon = 20.0) {
    MapConfig m;
    m.horizon = horizon;
    m.dt = 1e-2;
    m.workers = 1;
    return m;
}

}  // namespace testing_helpers
