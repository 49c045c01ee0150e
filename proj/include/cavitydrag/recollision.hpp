#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cavitydrag/equilibrium.hpp"
#include "cavitydrag/history.hpp"

namespace cavitydrag {

// Transverse acceptance used inside the quadrature.
//   necessary:    |v_perp| Delta(s,t) <= 2R on every frontal leg
//   unrestricted: every recolliding particle accepted (full Gaussian mass)
enum class Acceptance { necessary, unrestricted };

std::string to_string(Acceptance a);
Acceptance acceptance_from_string(const std::string& s);

struct QuadratureOptions {
    std::size_t nodes = 256;      // initial Gauss-Legendre budget on the v_x range
    std::size_t max_nodes = 8192;
    double rel_tol = 1e-6;        // node-doubling agreement
    int depth_cap = 8;
    std::size_t probes = 64;      // signature probes used to split the range
    Acceptance acceptance = Acceptance::necessary;
};

// Everything the quadrature needs besides the evaluation time.
struct RecollisionContext {
    const VelocityHistory* history = nullptr;
    DragLaw law;
    double s_star = 0.0;  // +inf: nobody trapped; from solve_s_star
    QuadratureOptions opt;
};

RecollisionContext make_context(const VelocityHistory& h, const DragLaw& law,
                                const QuadratureOptions& opt = {});

struct RecollisionBreakdown {
    double t = 0.0;
    double f0 = 0.0;  // F0(V(t))
    double r_plus = 0.0;
    double r_minus = 0.0;
    double contrib_far = 0.0;      // s >= t/2
    double contrib_mid = 0.0;      // min(s*, t/2) <= s < t/2
    double contrib_trapped = 0.0;  // s < min(s*, t/2)
    std::size_t n_vx_nodes = 0;
    double rel_err = 0.0;  // node-doubling disagreement, worst of r+ and r-
    bool converged = true;
    std::size_t cap_hits = 0;
    std::size_t n_pieces = 0;
};

// Most recent s in [0,t) with window_mean(s,t) = v_x, for a particle that
// hits the front (v_x < W(t)) or the back (v_x > W(t)) of the base at t.
std::optional<double> recollision_time(const VelocityHistory& h, double t, double v_x);

// Same in deficit form, w = V_inf - v_x.
std::optional<double> recollision_time_deficit(const VelocityHistory& h, double t, double w);

struct BackwardVx {
    double v0x = 0.0;
    int depth = 0;
    bool cap_hit = false;
    std::vector<double> times;  // recollision times, most recent first
};

// Axial velocity at time 0 along the backward characteristic (no transverse filter).
BackwardVx backward_vx(const VelocityHistory& h, double t, double v_x, int depth_cap = 8);

RecollisionBreakdown r_plus(const RecollisionContext& ctx, double t);
RecollisionBreakdown r_minus(const RecollisionContext& ctx, double t);

// Both parts plus F0(V(t)).
RecollisionBreakdown evaluate(const RecollisionContext& ctx, double t);

std::vector<RecollisionBreakdown> evaluate_table(const RecollisionContext& ctx,
                                                 const std::vector<double>& times,
                                                 std::size_t workers = 0);

// CSV: t, r_plus, r_minus, contrib_far, contrib_mid, contrib_trapped
std::string breakdown_csv(const std::vector<RecollisionBreakdown>& rows);

struct SingleRecollisionWindow {
    double t = 0.0;
    double s0 = 0.0;
    double m1 = 0.0;  // log(3/2)/C-
    double m2 = 0.0;  // log(4)/C+
    bool found = false;
    bool valid = false;
};

// Smallest root of q(s) = 2W(s) - Wbar_{s,t} - V0.
SingleRecollisionWindow single_recollision_window(const VelocityHistory& h, double t);

}  // namespace cavitydrag
