#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cavitydrag/equilibrium.hpp"

namespace cavitydrag {

// Algebraic part of the upper envelope, A+ gamma^3 / (1+t)^alpha.
struct TailEnvelope {
    double alpha = 3.0;
    double a_plus = 0.0;
};

// Velocity W(t) on a uniform grid t_i = i*dt, i = 0..N.
//
// Stored as the deficit u = V_inf - W together with prefix and suffix
// trapezoid integrals of u. The late-time deficit is many orders of
// magnitude below V_inf, so everything downstream works with u directly.
class VelocityHistory {
public:
    VelocityHistory() = default;
    VelocityHistory(double dt, std::vector<double> deficits, const EquilibriumSummary& summary,
                    TailEnvelope envelope = {});

    static VelocityHistory from_velocities(double dt, const std::vector<double>& w,
                                           const EquilibriumSummary& summary,
                                           TailEnvelope envelope = {});

    std::size_t size() const { return u_.size(); }
    std::size_t steps() const { return u_.size() - 1; }
    double dt() const { return dt_; }
    double horizon() const { return dt_ * static_cast<double>(steps()); }
    double time(std::size_t i) const { return dt_ * static_cast<double>(i); }

    const EquilibriumSummary& summary() const { return summary_; }
    const TailEnvelope& envelope() const { return envelope_; }
    void set_envelope(TailEnvelope e) { envelope_ = e; }
    double v_inf() const { return summary_.v_inf; }
    double gamma() const { return summary_.gamma; }

    const std::vector<double>& deficits() const { return u_; }
    double deficit(std::size_t i) const { return u_[i]; }
    double velocity(std::size_t i) const { return summary_.v_inf - u_[i]; }

    double value_at(double t) const;
    double deficit_at(double t) const;

    // int_s^t u, picking prefix or suffix sums by their rounding error.
    double integral(double s, double t) const;
    // int_0^t W
    double position(double t) const;

    double window_mean(double s, double t) const;
    double window_mean_deficit(double s, double t) const;

    // int_t^{t_N} u
    double suffix(double t) const;
    double prefix(double t) const;

    // min of u over [0, t]
    double min_deficit_until(double t) const;
    // last node index m with u non-increasing on [0, t_m]
    std::size_t monotone_end() const { return mono_end_; }
    bool monotone_until(double t) const { return t <= time(mono_end_); }
    // u non-increasing on [s, t] (checked cell by cell)
    bool nonincreasing_on(double s, double t) const;

    // gamma e^{-C+ t} + A+ gamma^3/(1+t)^alpha
    double envelope_upper(double t) const;
    // int_a^inf of envelope_upper
    double envelope_tail(double a) const;

    // Locate t on the grid: cell index i with t in [t_i, t_{i+1}] and theta.
    void locate(double t, std::size_t& i, double& theta) const;

private:
    void check_time(double t) const;

    double dt_ = 0.0;
    std::vector<double> u_;
    std::vector<double> pre_;
    std::vector<double> suf_;
    std::vector<double> run_min_;
    std::vector<std::size_t> up_next_;  // first k >= i with u_{k+1} > u_k
    std::size_t mono_end_ = 0;
    EquilibriumSummary summary_;
    TailEnvelope envelope_;
};

struct OmegaReport {
    double alpha = 3.0;
    double a_plus = 0.0;
    bool ok_lower = true;
    bool ok_upper = true;
    bool ok_monotone = true;
    // min over nodes of the relative slack of both bounds; negative on failure
    double worst_margin = 0.0;
    std::size_t worst_index = 0;
    std::size_t n_lower_fail = 0;
    std::size_t n_upper_fail = 0;
    std::size_t n_monotone_fail = 0;

    bool ok() const { return ok_lower && ok_upper && ok_monotone; }
};

OmegaReport omega_check(const VelocityHistory& h, double alpha, double a_plus);

// Smallest A+ for which the upper bound of the class holds on every node.
double minimal_a_plus(const VelocityHistory& h, double alpha);

struct Lemma31Report {
    std::size_t n_pairs = 0;
    std::size_t fail_a = 0;  // W(t) > mean over [0,t]
    std::size_t fail_b = 0;  // mean over [0,t] increasing in t
    std::size_t fail_c = 0;  // mean over [s,t] above mean over [0,t]
    std::size_t fail_identity = 0;
    double fitted_c = 0.0;  // max (W(t) - Wbar_t)(1+t)/(gamma + A+ gamma^3)
    bool ok_a() const { return fail_a == 0; }
    bool ok_b() const { return fail_b == 0; }
    bool ok_c() const { return fail_c == 0; }
};

// Checks on an n_t x n_s sample of (s,t) pairs.
Lemma31Report lemma31_check(const VelocityHistory& h, std::size_t n_t = 100, std::size_t n_s = 100);

// CSV with columns t, W (17 significant digits).
std::string history_csv(const VelocityHistory& h);

}  // namespace cavitydrag
