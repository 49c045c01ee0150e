#include "cavitydrag/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "cavitydrag/trapping.hpp"

namespace cavitydrag {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

inline double floor_term(const VelocityHistory& h, double t) {
    return h.gamma() * std::exp(-h.summary().c_minus * t);
}

inline double residual(const VelocityHistory& h, std::size_t i) {
    return h.deficit(i) - floor_term(h, h.time(i));
}

inline bool is_noise(const VelocityHistory& h, std::size_t i) {
    const double scale = std::max(h.deficit(i), floor_term(h, h.time(i)));
    return residual(h, i) <= 64.0 * kEps * scale + std::numeric_limits<double>::min();
}

}  // namespace

FitWindow default_fit_window(const VelocityHistory& h, double barrier) {
    FitWindow w;
    const double T = h.horizon();
    w.t_hi = T;
    const TrappingSummary ts = solve_s_star(h, barrier, h.envelope().alpha);
    w.s_plus = ts.s_plus;
    double lo = 0.5 * T;
    if (std::isfinite(ts.s_plus)) lo = std::max(lo, 5.0 * ts.s_plus);
    // the algebraic part has to dominate the exponential one by 100x
    std::size_t k = h.steps();
    while (k > 0 && !is_noise(h, k) && floor_term(h, h.time(k)) <= 0.01 * residual(h, k)) --k;
    lo = std::max(lo, h.time(std::min(k + 1, h.steps())));
    w.t_lo = lo;
    w.ok = lo < 0.9 * T;
    return w;
}

FitReport tail_exponent(const VelocityHistory& h, double t_lo, double t_hi) {
    FitReport r;
    r.t_lo = t_lo;
    r.t_hi = t_hi;
    if (!(t_lo > 0.0) || !(t_hi > t_lo) || t_hi > h.horizon() * (1.0 + 1e-12))
        throw Error("fit window must satisfy 0 < t_lo < t_hi <= T");
    std::size_t a = static_cast<std::size_t>(std::ceil(t_lo / h.dt() - 1e-9));
    std::size_t b = std::min(h.steps(), static_cast<std::size_t>(std::floor(t_hi / h.dt() + 1e-9)));
    for (std::size_t i = a; i <= b; ++i) {
        if (is_noise(h, i)) {
            r.shrunk = true;
            b = i == 0 ? 0 : i - 1;
            r.t_hi = h.time(b);
            break;
        }
    }
    if (b < a + 10) {
        r.refused = true;
        r.note = "residual below noise floor";
        return r;
    }
    for (std::size_t i = a; i <= b; ++i) {
        if (floor_term(h, h.time(i)) > 0.01 * residual(h, i)) {
            r.refused = true;
            r.note = "exponential part exceeds 1% of the residual";
            return r;
        }
    }
    // ordinary least squares of log residual on log t
    const std::size_t n = b - a + 1;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = a; i <= b; ++i) {
        mx += std::log(h.time(i));
        my += std::log(residual(h, i));
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = a; i <= b; ++i) {
        const double dx = std::log(h.time(i)) - mx;
        const double dy = std::log(residual(h, i)) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double slope = sxy / sxx;
    const double icpt = my - slope * mx;
    double sse = 0.0;
    for (std::size_t i = a; i <= b; ++i) {
        const double e = std::log(residual(h, i)) - (icpt + slope * std::log(h.time(i)));
        sse += e * e;
    }
    const double dof = static_cast<double>(n) - 2.0;
    const double se = std::sqrt(sse / dof / sxx);
    const boost::math::students_t dist(dof);
    r.exponent = -slope;
    r.exponent_ci = boost::math::quantile(dist, 0.975) * se;
    r.coefficient = std::exp(icpt);
    r.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    r.n_points = n;
    r.t_lo = h.time(a);
    r.fitted = true;
    return r;
}

void verify_thm31(const VelocityHistory& h, FitReport& rep) {
    rep.lower_ok = true;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double lo = floor_term(h, h.time(i));
        if (h.deficit(i) < lo * (1.0 - 1e-12)) {
            rep.lower_ok = false;
            rep.lower_fail_index = i;
            break;
        }
    }
    rep.a_plus_min = minimal_a_plus(h, 3.0);
}

std::vector<double> exp_convolution(const std::vector<double>& times, const std::vector<double>& g, double c) {
    if (times.size() != g.size() || times.empty()) throw Error("convolution needs matching rows");
    std::vector<double> out(times.size(), 0.0);
    double acc = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double d = times[k] - times[k - 1];
        const double z = c * d;
        const double e = std::exp(-z);
        // exact weights for a linear g on [t_{k-1}, t_k]
        double w0, w1;
        if (z < 1e-4) {
            w0 = d * (0.5 - z / 3.0 + z * z / 8.0);
            w1 = d * (0.5 - z / 6.0 + z * z / 24.0);
        } else {
            const double em1 = -std::expm1(-z);  // 1 - e^{-z}
            w1 = d * (z - em1) / (z * z);
            w0 = d * (em1 - z * e) / (z * z);
        }
        acc = e * acc + w0 * g[k - 1] + w1 * g[k];
        out[k] = acc;
    }
    return out;
}

void verify_thm32(const VelocityHistory& h, const std::vector<RecollisionBreakdown>& table,
                  FitReport& rep, double chain_tol) {
    const double T = h.horizon();
    const double g4 = std::pow(h.gamma(), 4);
    // A-(t_bar) = min over t > t_bar of residual t^3 / gamma^4
    std::vector<double> ratio(h.size(), 0.0);
    for (std::size_t i = 1; i < h.size(); ++i) {
        const double t = h.time(i);
        ratio[i] = residual(h, i) * t * t * t / g4;
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = h.size(); i-- > 1;) {
        if (h.time(i) <= 0.5 * T) break;
        best = std::min(best, ratio[i]);
    }
    rep.a_minus_fit = best > 0.0 && std::isfinite(best) ? 0.5 * best : 0.0;
    rep.t_bar = T;
    if (rep.a_minus_fit > 0.0) {
        std::size_t i = h.size() - 1;
        while (i > 1 && ratio[i - 1] >= rep.a_minus_fit) --i;
        rep.t_bar = h.time(i - 1);
    }
    rep.thm32_ok = rep.a_minus_fit > 0.0 && rep.t_bar < 0.5 * T;

    // r+ t^3 >= c gamma^4 past t_bar
    double c = std::numeric_limits<double>::infinity();
    for (const auto& row : table)
        if (row.t > rep.t_bar) c = std::min(c, row.r_plus * row.t * row.t * row.t / g4);
    rep.c_r_plus = std::isfinite(c) ? c : 0.0;

    // chain: V_inf - V >= gamma e^{-C- t} + int_0^t e^{-C-(t-s)} r+(s) ds
    std::vector<double> ts, rp;
    for (const auto& row : table) {
        ts.push_back(row.t);
        rp.push_back(row.r_plus);
    }
    rep.duhamel_ok = true;
    rep.duhamel_worst = std::numeric_limits<double>::infinity();
    if (ts.empty()) return;
    const std::vector<double> conv = exp_convolution(ts, rp, h.summary().c_minus);
    // t = 0 holds with equality, start past it
    for (std::size_t k = ts.size() > 1 ? 1 : 0; k < ts.size(); ++k) {
        const double bound = floor_term(h, ts[k]) + conv[k];
        const double margin = h.deficit_at(ts[k]) / bound - 1.0;
        rep.duhamel_worst = std::min(rep.duhamel_worst, margin);
    }
    rep.duhamel_ok = rep.duhamel_worst >= -chain_tol;
}

double r_plus_envelope_ratio(const std::vector<RecollisionBreakdown>& table, double t_lo, double t_hi) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& row : table) {
        if (row.t < t_lo || row.t > t_hi) continue;
        const double v = row.r_plus * std::pow(1.0 + row.t, 3);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(lo > 0.0) || !std::isfinite(lo)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

std::string fit_json(const FitReport& r) {
    char buf[2048];
    std::snprintf(buf, sizeof buf,
                  "{\"exponent\": %.17g, \"exponent_ci\": %.17g, \"coefficient\": %.17g, \"r2\": %.17g, "
                  "\"t_lo\": %.17g, \"t_hi\": %.17g, \"n_points\": %zu, \"fitted\": %s, \"refused\": %s, "
                  "\"shrunk\": %s, \"note\": \"%s\", \"lower_ok\": %s, \"a_plus_min\": %.17g, "
                  "\"thm32_ok\": %s, \"a_minus_fit\": %.17g, \"t_bar\": %.17g, \"c_r_plus\": %.17g, "
                  "\"duhamel_ok\": %s, \"duhamel_worst\": %.17g}",
                  r.exponent, r.exponent_ci, r.coefficient, r.r2, r.t_lo, r.t_hi, r.n_points,
                  r.fitted ? "true" : "false", r.refused ? "true" : "false", r.shrunk ? "true" : "false",
                  r.note.c_str(), r.lower_ok ? "true" : "false", r.a_plus_min, r.thm32_ok ? "true" : "false",
                  r.a_minus_fit, r.t_bar, r.c_r_plus, r.duhamel_ok ? "true" : "false",
                  std::isfinite(r.duhamel_worst) ? r.duhamel_worst : 0.0);
    return buf;
}

std::string fit_summary(const FitReport& r) {
    char buf[1024];
    if (!r.fitted) {
        std::snprintf(buf, sizeof buf, "tail fit: refused (%s)\n", r.note.c_str());
        return buf;
    }
    std::snprintf(buf, sizeof buf,
                  "tail exponent   %.4f +- %.4f  on [%g, %g], %zu points, r2 %.6f%s\n"
                  "lower bound     %s\n"
                  "A+ minimal      %.6g\n"
                  "A- / t_bar      %.6g / %g  (%s)\n"
                  "r+ t^3/gamma^4  >= %.6g past t_bar\n"
                  "Duhamel chain   %s (worst margin %.3g)\n",
                  r.exponent, r.exponent_ci, r.t_lo, r.t_hi, r.n_points, r.r2, r.shrunk ? " (shrunk)" : "",
                  r.lower_ok ? "holds" : "VIOLATED", r.a_plus_min, r.a_minus_fit, r.t_bar,
                  r.thm32_ok ? "ok" : "failed", r.c_r_plus, r.duhamel_ok ? "holds" : "VIOLATED",
                  r.duhamel_worst);
    return buf;
}

}  // namespace cavitydrag
