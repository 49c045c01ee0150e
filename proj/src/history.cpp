#include "cavitydrag/history.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace cavitydrag {

namespace {

// Neumaier-compensated running sum.
struct Accum {
    double sum = 0.0, comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

VelocityHistory::VelocityHistory(double dt, std::vector<double> deficits,
                                 const EquilibriumSummary& summary, TailEnvelope envelope)
    : dt_(dt), u_(std::move(deficits)), summary_(summary), envelope_(envelope) {
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw Error("time step must be positive");
    if (u_.size() < 2) throw Error("history needs at least two nodes");
    const double cap = summary_.gamma > 0.0 ? summary_.gamma * (1.0 + 1e-9) : 0.0;
    for (std::size_t i = 0; i < u_.size(); ++i) {
        const double u = u_[i];
        if (!std::isfinite(u) || u < 0.0)
            throw Error("velocity must stay below the limiting velocity (node " + std::to_string(i) + ")");
        if (cap > 0.0 && u > cap)
            throw Error("velocity must stay above the initial velocity (node " + std::to_string(i) + ")");
    }
    const std::size_t n = u_.size();
    pre_.assign(n, 0.0);
    suf_.assign(n, 0.0);
    run_min_.assign(n, 0.0);
    Accum a;
    for (std::size_t i = 1; i < n; ++i) {
        a.add(0.5 * dt_ * (u_[i - 1] + u_[i]));
        pre_[i] = a.value();
    }
    Accum b;
    for (std::size_t i = n - 1; i-- > 0;) {
        b.add(0.5 * dt_ * (u_[i] + u_[i + 1]));
        suf_[i] = b.value();
    }
    run_min_[0] = u_[0];
    for (std::size_t i = 1; i < n; ++i) run_min_[i] = std::min(run_min_[i - 1], u_[i]);
    mono_end_ = 0;
    while (mono_end_ + 1 < n && u_[mono_end_ + 1] <= u_[mono_end_]) ++mono_end_;
    up_next_.assign(n, n - 1);
    for (std::size_t i = n - 1; i-- > 0;)
        up_next_[i] = u_[i + 1] > u_[i] ? i : up_next_[i + 1];
}

bool VelocityHistory::nonincreasing_on(double s, double t) const {
    std::size_t i;
    double th;
    locate(s, i, th);
    return t <= time(up_next_[i]);
}

VelocityHistory VelocityHistory::from_velocities(double dt, const std::vector<double>& w,
                                                 const EquilibriumSummary& summary,
                                                 TailEnvelope envelope) {
    std::vector<double> u(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) u[i] = summary.v_inf - w[i];
    return VelocityHistory(dt, std::move(u), summary, envelope);
}

void VelocityHistory::check_time(double t) const {
    if (!(t >= 0.0) || t > horizon() * (1.0 + 1e-12) + 1e-300)
        throw Error("time " + std::to_string(t) + " outside the history grid");
}

void VelocityHistory::locate(double t, std::size_t& i, double& theta) const {
    const std::size_t n = steps();
    double q = t / dt_;
    if (q <= 0.0) {
        i = 0;
        theta = 0.0;
        return;
    }
    std::size_t k = static_cast<std::size_t>(q);
    if (k >= n) {
        i = n - 1;
        theta = std::min(1.0, q - static_cast<double>(n - 1));
        return;
    }
    i = k;
    theta = q - static_cast<double>(k);
}

double VelocityHistory::deficit_at(double t) const {
    check_time(t);
    std::size_t i;
    double th;
    locate(t, i, th);
    return (1.0 - th) * u_[i] + th * u_[i + 1];
}

double VelocityHistory::value_at(double t) const { return summary_.v_inf - deficit_at(t); }

double VelocityHistory::prefix(double t) const {
    check_time(t);
    std::size_t i;
    double th;
    locate(t, i, th);
    const double ut = (1.0 - th) * u_[i] + th * u_[i + 1];
    return pre_[i] + 0.5 * dt_ * th * (u_[i] + ut);
}

double VelocityHistory::suffix(double t) const {
    check_time(t);
    std::size_t i;
    double th;
    locate(t, i, th);
    const double ut = (1.0 - th) * u_[i] + th * u_[i + 1];
    return suf_[i + 1] + 0.5 * dt_ * (1.0 - th) * (ut + u_[i + 1]);
}

double VelocityHistory::integral(double s, double t) const {
    if (s == t) return 0.0;
    if (s > t) return -integral(t, s);
    check_time(s);
    check_time(t);
    std::size_t i, j;
    double ts, tt;
    locate(s, i, ts);
    locate(t, j, tt);
    const double us = (1.0 - ts) * u_[i] + ts * u_[i + 1];
    const double ut = (1.0 - tt) * u_[j] + tt * u_[j + 1];
    if (i == j) return 0.5 * dt_ * (tt - ts) * (us + ut);
    // [s, t_{i+1}] + [t_{i+1}, t_j] + [t_j, t]
    const double head = 0.5 * dt_ * (1.0 - ts) * (us + u_[i + 1]);
    const double tail = 0.5 * dt_ * tt * (u_[j] + ut);
    double mid;
    if (suf_[i + 1] < pre_[j])
        mid = suf_[i + 1] - suf_[j];
    else
        mid = pre_[j] - pre_[i + 1];
    return head + mid + tail;
}

double VelocityHistory::position(double t) const { return summary_.v_inf * t - prefix(t); }

double VelocityHistory::window_mean_deficit(double s, double t) const {
    if (!(s < t)) throw Error("window needs s < t");
    return integral(s, t) / (t - s);
}

double VelocityHistory::window_mean(double s, double t) const {
    return summary_.v_inf - window_mean_deficit(s, t);
}

double VelocityHistory::min_deficit_until(double t) const {
    check_time(t);
    std::size_t i;
    double th;
    locate(t, i, th);
    const double ut = (1.0 - th) * u_[i] + th * u_[i + 1];
    return std::min(run_min_[i], ut);
}

double VelocityHistory::envelope_upper(double t) const {
    const double g = summary_.gamma;
    return g * std::exp(-summary_.c_plus * t) +
           envelope_.a_plus * g * g * g / std::pow(1.0 + t, envelope_.alpha);
}

double VelocityHistory::envelope_tail(double a) const {
    const double g = summary_.gamma;
    double r = g / summary_.c_plus * std::exp(-summary_.c_plus * a);
    if (envelope_.a_plus > 0.0)
        r += envelope_.a_plus * g * g * g /
             ((envelope_.alpha - 1.0) * std::pow(1.0 + a, envelope_.alpha - 1.0));
    return r;
}

OmegaReport omega_check(const VelocityHistory& h, double alpha, double a_plus) {
    if (!(alpha > 1.0)) throw Error("alpha must exceed 1");
    const EquilibriumSummary& s = h.summary();
    const double g = s.gamma;
    const double tol = 1e-12;
    OmegaReport r;
    r.alpha = alpha;
    r.a_plus = a_plus;
    r.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double t = h.time(i);
        const double u = h.deficit(i);
        const double lo = g * std::exp(-s.c_minus * t);
        const double hi = g * std::exp(-s.c_plus * t) + a_plus * g * g * g / std::pow(1.0 + t, alpha);
        const double m_lo = lo > 0.0 ? (u - lo) / lo : (u >= 0.0 ? 1.0 : -1.0);
        const double m_hi = hi > 0.0 ? (hi - u) / hi : (u <= 0.0 ? 1.0 : -1.0);
        if (m_lo < -tol) {
            r.ok_lower = false;
            ++r.n_lower_fail;
        }
        if (m_hi < -tol) {
            r.ok_upper = false;
            ++r.n_upper_fail;
        }
        const double m = std::min(m_lo, m_hi);
        if (m < r.worst_margin) {
            r.worst_margin = m;
            r.worst_index = i;
        }
        if (t < s.t0 && i + 1 < h.size() && !(h.deficit(i + 1) < h.deficit(i))) {
            r.ok_monotone = false;
            ++r.n_monotone_fail;
        }
    }
    return r;
}

double minimal_a_plus(const VelocityHistory& h, double alpha) {
    const EquilibriumSummary& s = h.summary();
    const double g = s.gamma;
    double best = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double t = h.time(i);
        const double excess = h.deficit(i) - g * std::exp(-s.c_plus * t);
        if (excess > 0.0) best = std::max(best, excess * std::pow(1.0 + t, alpha) / (g * g * g));
    }
    return best;
}

Lemma31Report lemma31_check(const VelocityHistory& h, std::size_t n_t, std::size_t n_s) {
    Lemma31Report r;
    const double g = h.gamma();
    const double strict = 64.0 * std::numeric_limits<double>::epsilon() * g;
    const double T = h.horizon();
    const double a3 = g + h.envelope().a_plus * g * g * g;
    for (std::size_t j = 0; j < n_t; ++j) {
        const double t = T * static_cast<double>(j + 1) / static_cast<double>(n_t);
        const double ubar = h.window_mean_deficit(0.0, t);
        const double ut = h.deficit_at(t);
        if (!(ubar - ut > strict)) ++r.fail_a;
        r.fitted_c = std::max(r.fitted_c, (ubar - ut) * (1.0 + t) / a3);
        if (t + h.dt() <= T) {
            const double next = h.window_mean_deficit(0.0, t + h.dt());
            // Wbar(t+dt) - Wbar(t) = ubar(t) - ubar(t+dt)
            if (ubar - next < -1e-10) ++r.fail_b;
        }
        for (std::size_t k = 0; k < n_s; ++k) {
            const double s = t * (static_cast<double>(k) + 0.5) / static_cast<double>(n_s);
            ++r.n_pairs;
            const double ust = h.window_mean_deficit(s, t);
            if (!(ubar - ust > strict)) ++r.fail_c;
            const double us = h.window_mean_deficit(0.0, s);
            const double lhs = ubar - ust;  // Wbar_{s,t} - Wbar_t
            const double rhs = s / (t - s) * (us - ubar);
            if (std::abs(lhs - rhs) > 1e-10 * g + 1e-8 * std::abs(lhs)) ++r.fail_identity;
        }
    }
    return r;
}

std::string history_csv(const VelocityHistory& h) {
    std::string out = "t,W\n";
    char buf[96];
    for (std::size_t i = 0; i < h.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", h.time(i), h.velocity(i));
        out += buf;
    }
    return out;
}

}  // namespace cavitydrag
