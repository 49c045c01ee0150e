// One line per acceptance criterion. Exit status is nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "cavitydrag/analysis.hpp"
#include "cavitydrag/config.hpp"
#include "cavitydrag/oracle.hpp"
#include "cavitydrag/scenario.hpp"
#include "cavitydrag/trapping.hpp"

using namespace cavitydrag;

namespace {

int n_fail = 0;
std::string lines[11];

// collected and printed in order at the end
void report(int n, bool ok, const std::string& detail) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "criterion %2d: %s  ", n, ok ? "PASS" : "FAIL");
    lines[n] = buf + detail;
    std::printf("  [criterion %d done]\n", n);
    std::fflush(stdout);
    if (!ok) ++n_fail;
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

bool in_band(double x, double lo, double hi) { return x >= lo && x <= hi; }

FixedPointRun preset_run(const std::string& name, double horizon = 0.0) {
    SimConfig c = preset(name);
    c.map_cfg.workers = 0;
    if (horizon > 0.0) c.map_cfg.horizon = horizon;
    const auto t0 = std::chrono::steady_clock::now();
    FixedPointRun r = run_fixed_point(c);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("  [%s T=%g: exponent %.4f on [%g, %g], %zu iterations, %.1f s]\n", name.c_str(),
                r.cfg.map_cfg.horizon, r.fit.exponent, r.fit.t_lo, r.fit.t_hi, r.trace.distances.size(), sec);
    std::fflush(stdout);
    return r;
}

bool converged_ok(const FixedPointRun& r) {
    return r.trace.converged && !r.trace.distances.empty() && r.trace.distances.back() < 1e-8 &&
           r.trace.distances.size() <= 20 && r.idempotence < 1e-8;
}

// r >= 0, r+ (1+t)^3 ratio over the fit window, r- = 0 before t0
struct ForcingCheck {
    bool ok = true;
    double ratio = 0.0;
    std::size_t negative = 0, early_minus = 0;
};

ForcingCheck forcing_check(const FixedPointRun& r) {
    ForcingCheck c;
    for (const auto& row : r.table) {
        if (row.r_plus < 0.0 || row.r_minus < 0.0) ++c.negative;
        if (row.t < r.eq.t0 && row.r_minus != 0.0) ++c.early_minus;
    }
    c.ratio = r_plus_envelope_ratio(r.table, r.fit.t_lo, r.fit.t_hi);
    c.ok = c.negative == 0 && c.early_minus == 0 && c.ratio < 50.0;
    return c;
}

void check_autonomous_envelope() {
    std::size_t bad = 0, nodes = 0;
    double worst = 0.0;
    for (const auto& name : {"disk3d", "disk2d", "cylinder-trapped", "box-trapped"}) {
        SimConfig c = preset(name);
        resolve(c);
        const DragLaw law = DragLaw::make(c.gas, c.body);
        const EquilibriumSummary eq = equilibrium_of(law);
        const VelocityHistory a = autonomous_solve(law, c.map_cfg);
        const double dt = c.map_cfg.dt;
        const double tol = 1e-8 + 10.0 * dt * dt * dt * dt;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double t = a.time(i), u = a.deficit(i);
            const double lo = eq.gamma * std::exp(-eq.c_minus * t) - u;
            const double hi = u - eq.gamma * std::exp(-eq.c_plus * t);
            worst = std::max({worst, lo, hi});
            if (lo > tol || hi > tol) ++bad;
            ++nodes;
        }
    }
    report(4, bad == 0,
           fmt("autonomous envelope: %g of %g nodes outside, worst excess %.3g (tol 1e-8 + 10 dt^4)", double(bad),
               double(nodes), worst));
}

void check_f0_suite() {
    std::size_t bad = 0;
    double worst_odd = 0.0, worst_fd = 0.0;
    for (const auto& name : {"disk3d", "disk2d"}) {
        SimConfig c = preset(name);
        resolve(c);
        const DragLaw law = DragLaw::make(c.gas, c.body);
        double prev_f = drag_f0(law, -3.0), prev_d = drag_f0_prime(law, 0.0);
        for (int i = 1; i <= 1000; ++i) {
            const double v = 3.0 * i / 1000.0;
            const double f = drag_f0(law, v), d = drag_f0_prime(law, v);
            worst_odd = std::max(worst_odd, std::abs(f + drag_f0(law, -v)));
            if (!(f > -1e-10)) ++bad;                   // positivity
            if (d < prev_d - 1e-10) ++bad;             // convexity on v > 0
            if (drag_f0_second(law, v) < -1e-10) ++bad;
            const double hh = 1e-5 * std::max(1.0, v);
            const double fd = (drag_f0(law, v + hh) - drag_f0(law, v - hh)) / (2.0 * hh);
            worst_fd = std::max(worst_fd, std::abs(fd / d - 1.0));
            prev_d = d;
        }
        for (int i = 1; i <= 1000; ++i) {
            const double v = -3.0 + 6.0 * i / 1000.0;
            const double f = drag_f0(law, v);
            if (f < prev_f - 1e-10) ++bad;              // monotone
            prev_f = f;
        }
    }
    const bool ok = bad == 0 && worst_odd <= 1e-10 && worst_fd <= 1e-6;
    report(5, ok,
           fmt("F0 grids: %g sign/monotone/convexity failures, oddness %.2g, derivative rel err %.2g", double(bad),
               worst_odd, worst_fd));
}

void check_oracle() {
    SimConfig c = preset("cylinder-deep");
    c.map_cfg.workers = 0;
    const FixedPointRun r = run_fixed_point(c);
    const DragLaw law = DragLaw::make(r.cfg.gas, r.cfg.body);
    const VelocityHistory& h = r.trace.final;
    const RecollisionContext ctx = make_context(h, law, r.cfg.map_cfg.quad);
    bool ok = true;
    std::string detail;
    for (double t : {3.0, 10.0}) {
        OracleOptions opt;
        opt.n_samples = 100000;
        opt.seed = r.cfg.seed;
        opt.workers = 0;
        OracleOptions bare = opt;
        bare.truncate = true;
        const OracleEstimate tr = friction_mc(h, law, t, bare);
        const double z0 = std::abs(tr.estimate - drag_f0(law, h.value_at(t))) / tr.stderr_total;
        const OracleEstimate e = friction_mc(h, law, t, opt);
        const RecollisionBreakdown q = evaluate(ctx, t);
        const double quad = q.r_plus + q.r_minus;
        const double diff = std::abs(e.recollision() - quad);
        const double allowed = 3.0 * e.recollision_stderr() + std::abs(e.gap);
        const double gap_rel = quad > 0.0 ? std::abs(e.gap) / quad : 1.0;
        const bool row_ok = z0 <= 3.0 && diff <= allowed && gap_rel < 0.1 && quad > 0.0;
        ok = ok && row_ok;
        detail += fmt("t=%g: truncated z %.2f, |mc-quad| %.3g <= %.3g, ", t, z0, diff, allowed);
        detail += fmt("gap %.2f%%; ", 100.0 * gap_rel);
    }
    report(7, ok, "cylinder-deep, 1e5 samples: " + detail);
}

void check_s_star(const FixedPointRun& trapped) {
    // exponential envelope: f(s) = g e^{-cs}/c
    const double g = 0.01, c = 2.0;
    const std::size_t n = 200000;
    std::vector<double> u(n + 1);
    for (std::size_t i = 0; i <= n; ++i) u[i] = g * std::exp(-c * 1e-4 * static_cast<double>(i));
    EquilibriumSummary s;
    s.v_inf = 0.07;
    s.v0 = s.v_inf - g;
    s.gamma = g;
    s.c_plus = s.c_minus = c;
    s.t0 = std::log(c / g) / (2.0 * c);
    const VelocityHistory h(1e-4, std::move(u), s);
    double worst = 0.0;
    for (double hb : {1e-3, 1e-4, 1e-6}) {
        const TrappingSummary r = solve_s_star(h, hb);
        worst = std::max(worst, r.has_s_star ? std::abs(r.s_star - std::log(g / (c * hb)) / c) : 1.0);
    }
    const TrappingSummary& ts = trapped.trapping;
    const double dt = trapped.trace.final.dt();
    const bool bracket = ts.has_s_star && ts.s_minus <= ts.s_star + dt && ts.s_star <= ts.s_plus + dt;
    bool none_ok = true;
    const double f0 = aux_f(h, 0.0);
    for (double hb : {f0, 2.0 * f0}) {
        none_ok = none_ok && !solve_s_star(h, hb).has_s_star;
        for (double a = 0.0; a < 15.0; a += 0.75)
            for (double b : {a + 0.05, a + 1.0, 19.5})
                none_ok = none_ok && escape_intervals(h, a, b, hb).intervals.empty();
    }
    report(9, worst <= 1e-6 && bracket && none_ok,
           fmt("closed form err %.2g; s- %.4f <= s* %.4f <= s+ %.4f", worst, ts.s_minus, ts.s_star, ts.s_plus) +
               (none_ok ? "; h >= f(0): none, no escape" : "; h >= f(0) case FAILED"));
}

void check_refinement() {
    SimConfig base = preset("cylinder-trapped");
    base.map_cfg.horizon = 100.0;
    base.map_cfg.workers = 0;
    SimConfig fine = base;
    fine.map_cfg.dt = 0.5 * base.map_cfg.dt;
    fine.map_cfg.stride = 2 * base.map_cfg.stride;  // same table times
    fine.map_cfg.quad.nodes = 2 * base.map_cfg.quad.nodes;
    const FixedPointRun a = run_fixed_point(base);
    const FixedPointRun b = run_fixed_point(fine);
    const double de = std::abs(a.fit.exponent - b.fit.exponent);
    const double da = std::abs(b.fit.a_plus_min / a.fit.a_plus_min - 1.0);
    report(10, a.fit.fitted && b.fit.fitted && de < 0.1 && da < 0.05,
           fmt("T=100: exponent %.4f -> %.4f (diff %.2g), a_plus_min change %.2f%%", a.fit.exponent, b.fit.exponent,
               de, 100.0 * da));
}

}  // namespace

int main() {
    try {
        check_f0_suite();
        check_autonomous_envelope();

        const FixedPointRun cyl = preset_run("cylinder-trapped");
        const FixedPointRun box = preset_run("box-trapped");
        const FixedPointRun d3 = preset_run("disk3d");
        const FixedPointRun d2 = preset_run("disk2d");

        const double t_min = 300.0 / cyl.eq.c_minus;
        report(1,
               cyl.cfg.body.barrier < cyl.f0_total && cyl.cfg.map_cfg.horizon >= t_min && cyl.fit.fitted &&
                   in_band(cyl.fit.exponent, 2.6, 3.4) && cyl.fit.lower_ok && cyl.fit.thm32_ok &&
                   cyl.fit.a_minus_fit > 0.0 && cyl.fit.t_bar < 0.5 * cyl.cfg.map_cfg.horizon,
               fmt("cylinder-trapped: exponent %.4f, A- %.4g, t_bar %g, h/f(0) %.2f", cyl.fit.exponent,
                   cyl.fit.a_minus_fit, cyl.fit.t_bar, cyl.cfg.body.barrier / cyl.f0_total) +
                   (cyl.fit.lower_ok ? ", lower bound holds" : ", lower bound VIOLATED"));
        report(2, box.fit.fitted && in_band(box.fit.exponent, 2.6, 3.4),
               fmt("box-trapped (d=2): exponent %.4f", box.fit.exponent));
        report(3,
               d3.fit.fitted && d2.fit.fitted && in_band(d3.fit.exponent, 4.5, 5.5) &&
                   in_band(d2.fit.exponent, 3.5, 4.5),
               fmt("disk3d %.4f (5 +- 0.5), disk2d %.4f (4 +- 0.5)", d3.fit.exponent, d2.fit.exponent));

        bool ok6 = true;
        std::string d6;
        for (const FixedPointRun* r : {&cyl, &box, &d3, &d2}) {
            const ForcingCheck f = forcing_check(*r);
            ok6 = ok6 && f.ok;
            d6 += r->cfg.preset + fmt(" ratio %.3g neg %g early r- %g; ", f.ratio, double(f.negative),
                                      double(f.early_minus));
        }
        report(6, ok6, d6);

        check_oracle();

        bool ok8 = true;
        std::string d8;
        for (const FixedPointRun* r : {&cyl, &box, &d3, &d2}) {
            ok8 = ok8 && converged_ok(*r);
            d8 += r->cfg.preset + fmt(" %g it, last %.2g, extra %.2g; ", double(r->trace.distances.size()),
                                      r->trace.distances.empty() ? 0.0 : r->trace.distances.back(), r->idempotence);
        }
        report(8, ok8, d8);

        check_s_star(cyl);
        check_refinement();
    } catch (const std::exception& e) {
        for (int n = 1; n <= 10; ++n)
            if (!lines[n].empty()) std::printf("%s\n", lines[n].c_str());
        std::printf("error: %s\n", e.what());
        return 2;
    }
    std::printf("\n");
    for (int n = 1; n <= 10; ++n) std::printf("%s\n", lines[n].empty() ? "missing" : lines[n].c_str());
    std::printf("%d criteria failed\n", n_fail);
    return n_fail == 0 ? 0 : 1;
}
