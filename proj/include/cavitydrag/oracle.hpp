#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cavitydrag/equilibrium.hpp"
#include "cavitydrag/history.hpp"

namespace cavitydrag {

enum class EventKind { base, side };

// One reflection along a characteristic. "pre" is the velocity before the
// hit in forward time, "post" the one after it.
struct TraceEvent {
    double time = 0.0;
    EventKind kind = EventKind::base;
    double w_pre = 0.0;   // V_inf - v_x before the hit
    double w_post = 0.0;
    Perp v_perp_pre;
    Perp v_perp_post;
    double y = 0.0;       // x - X(time)
    Perp x_perp;
};

// Particle state relative to the body: y = x - X(t), w = V_inf - v_x.
struct RelativeState {
    double y = 0.0;
    Perp x_perp;
    double w = 0.0;
    Perp v_perp;
};

struct BackwardTrace {
    std::vector<TraceEvent> events;  // most recent first
    RelativeState start;             // state at time 0 (or where the walk stopped)
    double stop_time = 0.0;
    double v0x = 0.0;
    double w0 = 0.0;
    Perp v0_perp;
    std::size_t n_base = 0;
    std::size_t n_side = 0;
    bool overflow = false;  // max_events reached before time 0
};

// Walks the characteristic through (t, p) back to time 0. With on_base the
// particle sits on the plane of the base at t and front tells on which side.
BackwardTrace trace_backward_relative(const VelocityHistory& h, const BodyGeometry& body, double t,
                                      const RelativeState& p, std::size_t max_events,
                                      bool on_base = false, bool front = true);

// Same with absolute coordinates (x measured in the lab frame).
BackwardTrace trace_backward(const VelocityHistory& h, const BodyGeometry& body, double t,
                             const ParticleState& p, std::size_t max_events);

struct ForwardTrace {
    std::vector<TraceEvent> events;
    RelativeState end;
    std::size_t n_base = 0;
    std::size_t n_side = 0;
    bool overflow = false;
};

// Forward free flight with reflections from t_from to t_to; events closer
// than end_guard to t_to are not applied.
ForwardTrace trace_forward(const VelocityHistory& h, const BodyGeometry& body, double t_from,
                           double t_to, const RelativeState& p, std::size_t max_events,
                           double end_guard = 0.0);

struct OracleOptions {
    std::size_t n_samples = 100000;
    std::uint64_t seed = 1;
    bool truncate = false;        // drop every recollision (v0 = v)
    std::size_t max_events = 4096;
    std::size_t workers = 0;
};

// Monte Carlo value of F(t) split as F0 part + frontal + backward recollision parts.
// The recollision parts sample only the velocity window where a past hit is
// possible; outside it v0 = v and the integrand vanishes.
struct OracleEstimate {
    double t = 0.0;
    double estimate = 0.0;
    double stderr_total = 0.0;
    double f0_part = 0.0;
    double f0_stderr = 0.0;
    double rec_front = 0.0;
    double rec_front_stderr = 0.0;
    double rec_back = 0.0;
    double rec_back_stderr = 0.0;
    // the same frontal samples scored with the |v_perp| Delta <= 2R rule
    double necessary_front = 0.0;
    double necessary_front_stderr = 0.0;
    double gap = 0.0;  // necessary minus exact, paired
    double gap_stderr = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    bool truncated = false;
    std::size_t overflows = 0;
    std::size_t max_depth = 0;

    double recollision() const { return rec_front + rec_back; }
    double recollision_stderr() const;
};

OracleEstimate friction_mc(const VelocityHistory& h, const DragLaw& law, double t,
                           const OracleOptions& opt = {});

std::string oracle_json(const OracleEstimate& e);

// Membership in the discretised hitting regions around the base at t.
bool in_omega_plus(const VelocityHistory& h, const BodyGeometry& body, double t, double dt_small,
                   const RelativeState& p);
bool in_omega_minus(const VelocityHistory& h, const BodyGeometry& body, double t, double dt_small,
                    const RelativeState& p);
// Whether the particle actually hits the base during [t, t+dt_small].
bool hits_base(const VelocityHistory& h, const BodyGeometry& body, double t, double dt_small,
               const RelativeState& p);

struct OmegaRegionReport {
    double t = 0.0;
    double dt_small = 0.0;
    std::size_t n_samples = 0;
    double measure = 0.0;          // Gaussian-weighted phase volume of the discrete regions
    double misclassified = 0.0;    // volume of the symmetric difference at dt_small
    double misclassified_half = 0.0;
    double fraction = 0.0;         // misclassified / measure
    double fraction_half = 0.0;    // same at dt_small / 2
    double ratio = 0.0;            // fraction_half / fraction, 1/2 for first order
    std::size_t sign_violations = 0;  // samples with v_x > V and y > 0 inside the frontal region
};

// For each sampled (v, x_perp) the sets of y that hit are intervals, so the
// symmetric difference is measured exactly along y.
OmegaRegionReport omega_region_check(const VelocityHistory& h, const BodyGeometry& body,
                                     const GasParams& gas, double t, double dt_small,
                                     std::size_t n_samples = 20000, std::uint64_t seed = 7);

}  // namespace cavitydrag
