#include "cavitydrag/trapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cavitydrag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// d(s,t,tau) with the window mean already known.
inline double excess(const VelocityHistory& h, double s, double ubar, double tau) {
    return h.integral(s, tau) - (tau - s) * ubar;
}

// tau in [lo, hi] with u(tau) = level, u non-increasing on [lo, hi].
double level_crossing(const VelocityHistory& h, double lo, double hi, double level) {
    std::size_t i0, i1;
    double th;
    h.locate(lo, i0, th);
    h.locate(hi, i1, th);
    // last node in (lo, hi) with u >= level
    std::size_t a = i0 + 1, b = i1;  // candidate nodes
    double left = lo;
    if (a <= b && h.deficit(a) >= level) {
        while (a < b) {
            const std::size_t m = a + (b - a + 1) / 2;
            if (h.deficit(m) >= level)
                a = m;
            else
                b = m - 1;
        }
        left = std::max(lo, h.time(a));
    }
    std::size_t c;
    double tc;
    h.locate(left, c, tc);
    double right = std::min(hi, h.time(c + 1));
    const double ul = h.deficit_at(left), ur = h.deficit_at(right);
    if (ul <= level) return left;
    if (ur >= level) return right;
    const double x = left + (right - left) * (ul - level) / (ul - ur);
    return std::clamp(x, left, right);
}

// Root of f in [lo, hi] given sign(f(lo)) != sign(f(hi)); width tolerance tol.
template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
    const bool lo_pos = f(lo) > 0.0;
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double m = 0.5 * (lo + hi);
        if ((f(m) > 0.0) == lo_pos)
            lo = m;
        else
            hi = m;
    }
    return 0.5 * (lo + hi);
}

// Calls emit(a, b) for every maximal interval in (s,t) with d > barrier.
template <class Emit>
void scan_escapes(const VelocityHistory& h, double s, double t, double barrier, Emit&& emit) {
    if (!(s < t)) throw Error("escape intervals need s < t");
    const double total = h.integral(s, t);
    if (total <= barrier) return;  // d <= int_s^tau u <= int_s^t u
    const double ubar = total / (t - s);
    const double tol = 1e-9 * h.dt();
    auto d = [&](double tau) { return excess(h, s, ubar, tau) - barrier; };

    if (h.nonincreasing_on(s, t)) {
        // d is concave on [s,t]; single hump with its top where u = ubar.
        if (barrier == 0.0) {
            emit(s, t);
            return;
        }
        const double tm = level_crossing(h, s, t, ubar);
        if (!(d(tm) > 0.0)) return;
        const double a = bisect(d, s, tm, tol);
        const double b = bisect(d, tm, t, tol);
        if (b > a) emit(a, b);
        return;
    }

    std::size_t i0, i1;
    double th;
    h.locate(s, i0, th);
    h.locate(t, i1, th);
    std::vector<double> pts;
    pts.reserve(i1 - i0 + 2);
    pts.push_back(s);
    for (std::size_t k = i0 + 1; k <= i1; ++k) {
        const double tk = h.time(k);
        if (tk > s && tk < t) pts.push_back(tk);
    }
    pts.push_back(t);
    bool inside = false;
    double start = s;
    double prev = pts[0];
    double dprev = d(prev);
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const double cur = pts[k];
        const double dcur = (k + 1 == pts.size()) ? -barrier : d(cur);
        const bool above = dcur > 0.0;
        if (above && !inside) {
            start = (dprev > 0.0) ? prev : bisect(d, prev, cur, tol);
            inside = true;
        } else if (!above && inside) {
            const double end = bisect(d, prev, cur, tol);
            if (end > start) emit(start, end);
            inside = false;
        }
        prev = cur;
        dprev = dcur;
    }
    if (inside && t > start) emit(start, t);
}

}  // namespace

double distance_d(const VelocityHistory& h, double s, double t, double tau) {
    if (!(s <= tau && tau <= t)) throw Error("distance_d needs s <= tau <= t");
    if (s == t) return 0.0;
    if (tau == s || tau == t) return 0.0;
    return excess(h, s, h.window_mean_deficit(s, t), tau);
}

double aux_g(const VelocityHistory& h, double s, double tau) {
    if (!(s <= tau)) throw Error("aux_g needs s <= tau");
    const double T = h.horizon();
    if (std::isinf(tau)) return aux_f(h, s);
    if (tau <= T) return h.integral(s, tau);
    return aux_f(h, s) - aux_f(h, tau);
}

double aux_f(const VelocityHistory& h, double s) {
    if (!(s >= 0.0)) throw Error("aux_f needs s >= 0");
    const double T = h.horizon();
    if (s >= T) return h.envelope_tail(s);
    return h.suffix(s) + h.envelope_tail(T);
}

TrappingSummary solve_s_star(const VelocityHistory& h, double barrier, double alpha) {
    if (!(barrier >= 0.0)) throw Error("barrier must be >= 0");
    if (!(alpha > 1.0)) throw Error("alpha must exceed 1");
    const EquilibriumSummary& eq = h.summary();
    const double g = eq.gamma;
    TrappingSummary r;
    r.barrier = barrier;
    r.alpha = alpha;
    r.f0_total = aux_f(h, 0.0);
    r.theta_gamma = barrier / g;
    const double T = h.horizon();
    r.tail_remainder = h.envelope_tail(T) - g / eq.c_minus * std::exp(-eq.c_minus * T);

    for (std::size_t i = 0; i < h.size(); ++i) {
        const double s = h.time(i);
        r.fitted_c = std::max(r.fitted_c, aux_f(h, s) * std::pow(1.0 + s, alpha - 1.0) / g);
    }
    if (barrier == 0.0) {
        r.has_s_star = true;
        r.s_star = r.s_minus = r.s_plus = kInf;
        return r;
    }
    r.s_minus = std::log(g / (barrier * eq.c_minus)) / eq.c_minus;
    r.s_plus = std::pow(r.fitted_c * g / barrier, 1.0 / (alpha - 1.0)) - 1.0;
    if (barrier >= r.f0_total) {
        r.has_s_star = false;
        return r;
    }
    r.has_s_star = true;
    auto f = [&](double s) { return aux_f(h, s) - barrier; };
    double lo = 0.0, hi = T;
    if (f(T) > 0.0) {
        lo = T;
        hi = 2.0 * T + 1.0;
        while (f(hi) > 0.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300) throw Error("cannot bracket s*");
        }
    }
    for (int it = 0; it < 300 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        const double m = 0.5 * (lo + hi);
        if (f(m) > 0.0)
            lo = m;
        else
            hi = m;
    }
    r.s_star = 0.5 * (lo + hi);
    return r;
}

EscapeProfile escape_intervals(const VelocityHistory& h, double s, double t, double barrier) {
    EscapeProfile p;
    p.s = s;
    p.t = t;
    scan_escapes(h, s, t, barrier, [&](double a, double b) {
        p.intervals.push_back({a, b});
        p.delta_max = std::max(p.delta_max, b - a);
    });
    return p;
}

double escape_delta(const VelocityHistory& h, double s, double t, double barrier) {
    double best = 0.0;
    scan_escapes(h, s, t, barrier, [&](double a, double b) { best = std::max(best, b - a); });
    return best;
}

}  // namespace cavitydrag
