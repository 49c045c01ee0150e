#include "cavitydrag/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cavitydrag {

void MapConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("dt must be positive");
    if (!(horizon > dt) || !std::isfinite(horizon)) throw Error("horizon must exceed dt");
    if (!(fp_tol > 0.0)) throw Error("fp_tol must be positive");
    if (!(fp_rel_tol > 0.0)) throw Error("fp_rel_tol must be positive");
    if (fp_max_iter < 1) throw Error("fp_max_iter must be >= 1");
    if (stride < 1) throw Error("stride must be >= 1");
    if (!(mixing > 0.0 && mixing <= 1.0)) throw Error("mixing must lie in (0, 1]");
    if (!(alpha > 1.0)) throw Error("alpha must exceed 1");
    if (quad.nodes < 16) throw Error("quadrature needs at least 16 nodes");
    if (quad.depth_cap < 1) throw Error("depth cap must be >= 1");
    if (!(quad.rel_tol > 0.0)) throw Error("quadrature tolerance must be positive");
}

std::size_t MapConfig::steps() const {
    return static_cast<std::size_t>(std::llround(horizon / dt));
}

EquilibriumSummary equilibrium_of(const DragLaw& law) { return limit_velocity(law, law.body.force); }

double kernel_rate(const DragLaw& law, const EquilibriumSummary& eq, double u) {
    return std::clamp(secant_slope(law, eq.v_inf, u), eq.c_plus, eq.c_minus);
}

namespace {

void check_state(double y, double gamma, std::size_t i, double dt) {
    if (!std::isfinite(y) || y < 0.0 || y > gamma * (1.0 + 1e-9))
        throw Error("integration left [V0, V_inf) at t = " + std::to_string(dt * static_cast<double>(i)) +
                    " (V_inf - V = " + std::to_string(y) + ")");
}

VelocityHistory finish(double dt, std::vector<double> u, const EquilibriumSummary& eq, double alpha) {
    VelocityHistory h(dt, std::move(u), eq);
    h.set_envelope({alpha, minimal_a_plus(h, alpha)});
    return h;
}

}  // namespace

VelocityHistory autonomous_solve(const DragLaw& law, const MapConfig& cfg) {
    cfg.validate();
    const EquilibriumSummary eq = equilibrium_of(law);
    const std::size_t n = cfg.steps();
    const double dt = cfg.dt;
    std::vector<double> u(n + 1);
    u[0] = eq.gamma;
    auto f = [&](double y) { return -kernel_rate(law, eq, y) * y; };
    for (std::size_t i = 0; i < n; ++i) {
        const double y = u[i];
        const double k1 = f(y);
        const double k2 = f(y + 0.5 * dt * k1);
        const double k3 = f(y + 0.5 * dt * k2);
        const double k4 = f(y + dt * k3);
        u[i + 1] = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check_state(u[i + 1], eq.gamma, i + 1, dt);
    }
    return finish(dt, std::move(u), eq, cfg.alpha);
}

std::vector<double> subgrid_times(const VelocityHistory& h, std::size_t stride) {
    std::vector<double> out;
    const std::size_t n = h.steps();
    for (std::size_t i = 0; i <= n; i += stride) out.push_back(h.time(i));
    if (n % stride != 0) out.push_back(h.time(n));
    return out;
}

namespace {

// r(t) = r_plus + r_minus, piecewise linear through the table rows
struct Forcing {
    std::vector<double> t, r;
    explicit Forcing(const std::vector<RecollisionBreakdown>& rows) {
        for (const auto& row : rows) {
            t.push_back(row.t);
            r.push_back(row.r_plus + row.r_minus);
        }
        if (t.empty()) throw Error("empty recollision table");
        for (std::size_t i = 1; i < t.size(); ++i)
            if (!(t[i] > t[i - 1])) throw Error("recollision table times must increase");
    }
    double operator()(double x) const {
        if (x <= t.front()) return r.front();
        if (x >= t.back()) return r.back();
        const std::size_t k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin());
        const double a = t[k - 1], b = t[k];
        const double th = (x - a) / (b - a);
        return (1.0 - th) * r[k - 1] + th * r[k];
    }
};

void check_cover(const VelocityHistory& w, const Forcing& f) {
    if (f.t.front() > 0.0 || f.t.back() < w.horizon() * (1.0 - 1e-12))
        throw Error("recollision table does not cover the grid");
}

}  // namespace

VelocityHistory integrate_forced(const VelocityHistory& w, const DragLaw& law,
                                 const std::vector<RecollisionBreakdown>& table) {
    const EquilibriumSummary& eq = w.summary();
    const Forcing r(table);
    check_cover(w, r);
    const std::size_t n = w.steps();
    const double dt = w.dt();
    std::vector<double> u(n + 1);
    u[0] = eq.gamma;
    double k_left = kernel_rate(law, eq, w.deficit(0));
    double r_left = r(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = w.time(i);
        const double k_mid = kernel_rate(law, eq, 0.5 * (w.deficit(i) + w.deficit(i + 1)));
        const double k_right = kernel_rate(law, eq, w.deficit(i + 1));
        const double r_mid = r(t + 0.5 * dt);
        const double r_right = r(w.time(i + 1));
        const double y = u[i];
        const double k1 = -k_left * y + r_left;
        const double y2 = y + 0.5 * dt * k1;
        const double k2 = -k_mid * y2 + r_mid;
        const double y3 = y + 0.5 * dt * k2;
        const double k3 = -k_mid * y3 + r_mid;
        const double y4 = y + dt * k3;
        const double k4 = -k_right * y4 + r_right;
        u[i + 1] = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check_state(u[i + 1], eq.gamma, i + 1, dt);
        k_left = k_right;
        r_left = r_right;
    }
    return finish(dt, std::move(u), eq, w.envelope().alpha);
}

MapResult map_apply(const VelocityHistory& w, const DragLaw& law, const MapConfig& cfg) {
    cfg.validate();
    QuadratureOptions q = cfg.quad;
    q.acceptance = cfg.acceptance;
    const RecollisionContext ctx = make_context(w, law, q);
    MapResult out;
    out.table = evaluate_table(ctx, subgrid_times(w, cfg.stride), cfg.workers);
    for (const auto& row : out.table)
        if (!(row.r_plus >= 0.0) || !(row.r_minus >= 0.0))
            throw Error("negative recollision term at t = " + std::to_string(row.t));
    out.history = integrate_forced(w, law, out.table);
    return out;
}

VelocityHistory duhamel_eval(const VelocityHistory& w, const DragLaw& law,
                             const std::vector<RecollisionBreakdown>& table) {
    const EquilibriumSummary& eq = w.summary();
    const Forcing r(table);
    check_cover(w, r);
    const std::size_t n = w.steps();
    const double dt = w.dt();
    std::vector<double> u(n + 1);
    double kappa = 0.0;  // int_0^t K
    double conv = 0.0;   // int_0^t e^{-int_s^t K} r(s) ds
    double k_prev = kernel_rate(law, eq, w.deficit(0));
    double r_prev = r(0.0);
    u[0] = eq.gamma;
    for (std::size_t i = 0; i < n; ++i) {
        const double k_next = kernel_rate(law, eq, w.deficit(i + 1));
        const double r_next = r(w.time(i + 1));
        const double dk = 0.5 * dt * (k_prev + k_next);
        const double decay = std::exp(-dk);
        kappa += dk;
        conv = decay * conv + 0.5 * dt * (decay * r_prev + r_next);
        u[i + 1] = eq.gamma * std::exp(-kappa) + conv;
        k_prev = k_next;
        r_prev = r_next;
    }
    return finish(dt, std::move(u), eq, w.envelope().alpha);
}

FixedPointTrace fixed_point(const DragLaw& law, const MapConfig& cfg) {
    cfg.validate();
    FixedPointTrace tr;
    VelocityHistory cur = autonomous_solve(law, cfg);
    for (int it = 0; it < cfg.fp_max_iter; ++it) {
        MapResult res = map_apply(cur, law, cfg);
        const auto& a = cur.deficits();
        std::vector<double> next = res.history.deficits();
        double dist = 0.0, rel = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = std::abs(next[i] - a[i]);
            dist = std::max(dist, d);
            if (a[i] > 0.0) rel = std::max(rel, d / a[i]);
            else if (d > 0.0) rel = std::max(rel, 1.0);
        }
        if (cfg.mixing < 1.0)
            for (std::size_t i = 0; i < a.size(); ++i) next[i] = (1.0 - cfg.mixing) * a[i] + cfg.mixing * next[i];
        tr.distances.push_back(dist);
        tr.rel_distances.push_back(rel);
        tr.table = std::move(res.table);
        cur = finish(cur.dt(), std::move(next), cur.summary(), cfg.alpha);
        tr.converged = dist < cfg.fp_tol;
        tr.tail_converged = rel < cfg.fp_rel_tol;
        if (tr.converged && tr.tail_converged) break;
    }
    tr.final = cur;
    tr.omega = omega_check(cur, cfg.alpha, minimal_a_plus(cur, cfg.alpha));
    return tr;
}

}  // namespace cavitydrag
