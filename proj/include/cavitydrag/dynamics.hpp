#pragma once

#include <cstddef>
#include <vector>

#include "cavitydrag/history.hpp"
#include "cavitydrag/recollision.hpp"

namespace cavitydrag {

struct MapConfig {
    double horizon = 200.0;
    double dt = 1e-2;
    double fp_tol = 1e-8;       // sup-norm distance between iterates
    double fp_rel_tol = 1e-6;   // max |V_{n+1}-V_n| / (V_inf - V_n), tail convergence
    int fp_max_iter = 20;
    Acceptance acceptance = Acceptance::necessary;
    std::size_t stride = 10;    // r is evaluated every stride-th node
    double mixing = 1.0;        // 1 = plain iteration
    double alpha = 3.0;         // exponent of the class used in the reports
    QuadratureOptions quad;
    std::size_t workers = 0;    // 0 = all cores

    void validate() const;
    std::size_t steps() const;
};

struct MapResult {
    VelocityHistory history;
    std::vector<RecollisionBreakdown> table;
};

struct FixedPointTrace {
    std::vector<double> distances;      // sup-norm
    std::vector<double> rel_distances;  // relative to the deficit
    bool converged = false;             // last sup-norm distance < fp_tol
    bool tail_converged = false;        // last relative distance < fp_rel_tol
    VelocityHistory final;
    std::vector<RecollisionBreakdown> table;  // r evaluated on the last input iterate
    OmegaReport omega;                        // final iterate against alpha = 3, minimal A+
};

// V_inf, C+- etc. for the configured force.
EquilibriumSummary equilibrium_of(const DragLaw& law);

// dV/dt = E - F0(V) with classic RK4, written as u' = -K(u) u.
VelocityHistory autonomous_solve(const DragLaw& law, const MapConfig& cfg);

// Evaluation times of the r table: every stride-th node plus the last node.
std::vector<double> subgrid_times(const VelocityHistory& h, std::size_t stride);

// u' = -K_W(t) u + r(t) with K from W and r interpolated linearly from the table.
VelocityHistory integrate_forced(const VelocityHistory& w, const DragLaw& law,
                                 const std::vector<RecollisionBreakdown>& table);

MapResult map_apply(const VelocityHistory& w, const DragLaw& law, const MapConfig& cfg);

// Duhamel representation evaluated with nested trapezoid sums.
VelocityHistory duhamel_eval(const VelocityHistory& w, const DragLaw& law,
                             const std::vector<RecollisionBreakdown>& table);

FixedPointTrace fixed_point(const DragLaw& law, const MapConfig& cfg);

// K(t) = (E - F0(W))/(V_inf - W), clamped to [C+, C-].
double kernel_rate(const DragLaw& law, const EquilibriumSummary& eq, double u);

}  // namespace cavitydrag
