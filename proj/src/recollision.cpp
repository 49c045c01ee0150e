#include "cavitydrag/recollision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>

#include "cavitydrag/parallel.hpp"
#include "cavitydrag/quadrature.hpp"
#include "cavitydrag/trapping.hpp"

namespace cavitydrag {

std::string to_string(Acceptance a) {
    return a == Acceptance::necessary ? "necessary" : "unrestricted";
}

Acceptance acceptance_from_string(const std::string& s) {
    if (s == "necessary") return Acceptance::necessary;
    if (s == "unrestricted") return Acceptance::unrestricted;
    throw Error("unknown acceptance mode '" + s + "'");
}

RecollisionContext make_context(const VelocityHistory& h, const DragLaw& law,
                                const QuadratureOptions& opt) {
    RecollisionContext ctx;
    ctx.history = &h;
    ctx.law = law;
    ctx.opt = opt;
    const TrappingSummary ts = solve_s_star(h, law.body.barrier);
    ctx.s_star = ts.has_s_star ? ts.s_star : 0.0;
    return ctx;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (t-s)(ubar_{s,t} - w); the sign tells on which side of the base the particle is
inline double gap(const VelocityHistory& h, double s, double t, double w) {
    return h.integral(s, t) - (t - s) * w;
}

// Bisection on [lo, hi] where pred(lo) holds and pred(hi) does not.
template <class Pred>
double bisect_pred(Pred&& pred, double lo, double hi) {
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi));
    for (int it = 0; it < 100 && hi - lo > tol; ++it) {
        const double m = 0.5 * (lo + hi);
        if (m <= lo || m >= hi) break;
        if (pred(m))
            lo = m;
        else
            hi = m;
    }
    return 0.5 * (lo + hi);
}

// last grid node strictly before t
std::size_t last_node_before(const VelocityHistory& h, double t) {
    std::size_t i;
    double th;
    h.locate(t, i, th);
    if (th > 0.0) return i;
    return i == 0 ? 0 : i - 1;
}

}  // namespace

std::optional<double> recollision_time_deficit(const VelocityHistory& h, double t, double w) {
    if (!(t > 0.0)) return std::nullopt;
    const double ut = h.deficit_at(t);
    if (w == ut) return std::nullopt;
    const bool front = w > ut;
    // front: the particle sat ahead of the base just before t (gap > 0 wanted)
    auto hit = [&](double s) {
        const double g = gap(h, s, t, w);
        return front ? g >= 0.0 : g <= 0.0;
    };
    const std::size_t m = last_node_before(h, t);

    if (h.monotone_until(t)) {
        if (!front) return std::nullopt;  // ubar_{s,t} >= u(t) > w
        // ubar_{s,t} is non-increasing in s
        if (!hit(0.0)) return std::nullopt;
        if (gap(h, 0.0, t, w) == 0.0) return 0.0;
        std::size_t lo = 0, hi = m;  // hit(t_lo) holds
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo + 1) / 2;
            if (hit(h.time(mid)))
                lo = mid;
            else
                hi = mid - 1;
        }
        const double a = h.time(lo);
        const double b = lo < m ? h.time(lo + 1) : t;
        return bisect_pred(hit, a, b);
    }

    // general history: walk back from t, keep the most recent crossing
    double right = t;
    for (std::size_t k = m + 1; k-- > 0;) {
        const double s = h.time(k);
        if (s >= t) continue;
        if (hit(s)) {
            if (gap(h, s, t, w) == 0.0) return s;
            return bisect_pred(hit, s, right);
        }
        right = s;
    }
    return std::nullopt;
}

std::optional<double> recollision_time(const VelocityHistory& h, double t, double v_x) {
    return recollision_time_deficit(h, t, h.v_inf() - v_x);
}

BackwardVx backward_vx(const VelocityHistory& h, double t, double v_x, int depth_cap) {
    BackwardVx out;
    double tc = t;
    double wc = h.v_inf() - v_x;
    for (;;) {
        const auto s = recollision_time_deficit(h, tc, wc);
        if (!s || *s <= 0.0) break;
        if (out.depth >= depth_cap) {
            out.cap_hit = true;
            break;
        }
        out.times.push_back(*s);
        wc = 2.0 * h.deficit_at(*s) - wc;
        tc = *s;
        ++out.depth;
    }
    out.v0x = h.v_inf() - wc;
    return out;
}

namespace {

constexpr int kMaxDepth = 64;

struct Chain {
    int depth = 0;
    bool cap_hit = false;
    double s1 = 0.0;
    std::array<double, kMaxDepth> w{};      // deficit after each backward reflection
    std::array<double, kMaxDepth> delta{};  // escape span of the leg ending at that level
    std::array<bool, kMaxDepth> front{};
};

Chain trace_chain(const RecollisionContext& ctx, double t, double w) {
    const VelocityHistory& h = *ctx.history;
    const double barrier = ctx.law.body.barrier;
    const bool necessary = ctx.opt.acceptance == Acceptance::necessary;
    const int cap = std::min(ctx.opt.depth_cap, kMaxDepth);
    Chain c;
    double tc = t, wc = w;
    for (;;) {
        const auto s = recollision_time_deficit(h, tc, wc);
        if (!s || *s <= 0.0) break;
        if (c.depth >= cap) {
            c.cap_hit = true;
            break;
        }
        const bool front = wc > h.deficit_at(tc);
        double dl = 0.0;
        if (front && necessary) dl = escape_delta(h, *s, tc, barrier);
        if (c.depth == 0) c.s1 = *s;
        const double wn = 2.0 * h.deficit_at(*s) - wc;
        c.w[c.depth] = wn;
        c.delta[c.depth] = dl;
        c.front[c.depth] = front;
        ++c.depth;
        tc = *s;
        wc = wn;
    }
    return c;
}

struct PointEval {
    double value = 0.0;
    int region = 0;  // 0 far, 1 mid, 2 trapped
    std::uint64_t sig = 0;
    bool cap_hit = false;
};

// e^{-b(V-wk)^2} - e^{-b(V-w)^2} without cancellation
inline double gauss_diff(double beta, double vinf, double w, double wk) {
    const double v = vinf - w;
    return std::exp(-beta * v * v) * std::expm1(-beta * (w - wk) * (2.0 * vinf - w - wk));
}

PointEval eval_point(const RecollisionContext& ctx, double t, double ut, double delta, bool front) {
    const VelocityHistory& h = *ctx.history;
    const GasParams& gas = ctx.law.gas;
    const double w = front ? ut + delta : ut - delta;
    const Chain c = trace_chain(ctx, t, w);
    PointEval p;
    p.cap_hit = c.cap_hit;
    if (c.depth == 0) {
        p.sig = 0;
        return p;
    }
    const double beta = gas.beta, vinf = h.v_inf();
    const double two_r = 2.0 * ctx.law.body.radius;
    double phi = 0.0;
    std::uint64_t flags = 0, newmin = 0;
    if (!front) {
        phi = -transverse_mass(gas) * gauss_diff(beta, vinf, w, c.w[c.depth - 1]);
    } else if (ctx.opt.acceptance == Acceptance::unrestricted) {
        phi = transverse_mass(gas) * gauss_diff(beta, vinf, w, c.w[c.depth - 1]);
    } else {
        // level k is reached iff |v_perp| <= r_k = min_{j<=k} 2R/Delta_j
        std::array<double, kMaxDepth + 1> tw{};
        double r = kInf;
        for (int k = 0; k < c.depth; ++k) {
            if (c.front[k] && c.delta[k] > 0.0) {
                flags |= (std::uint64_t{1} << k);
                const double rk = two_r / c.delta[k];
                if (rk < r) {
                    r = rk;
                    newmin |= (std::uint64_t{1} << k);
                }
            }
            tw[k] = transverse_weight(gas, r);
        }
        tw[c.depth] = 0.0;
        for (int k = 0; k < c.depth; ++k)
            phi += (tw[k] - tw[k + 1]) * gauss_diff(beta, vinf, w, c.w[k]);
    }
    p.value = delta * delta * phi;
    if (front) {
        const double half = 0.5 * t;
        const double cut = std::min(ctx.s_star, half);
        p.region = c.s1 >= half ? 0 : (c.s1 >= cut ? 1 : 2);
    }
    p.sig = static_cast<std::uint64_t>(p.region) | (static_cast<std::uint64_t>(c.depth) << 2) |
            (static_cast<std::uint64_t>(c.cap_hit) << 7) | ((flags & 0xffffff) << 8) |
            ((newmin & 0xffffff) << 32);
    return p;
}

struct RangeResult {
    double total = 0.0;
    std::array<double, 3> region{0.0, 0.0, 0.0};
    std::size_t nodes = 0;
    double rel_err = 0.0;
    bool converged = true;
    std::size_t cap_hits = 0;
    std::size_t pieces = 0;
};

RangeResult integrate_range(const RecollisionContext& ctx, double t, double ut, double len, bool front) {
    RangeResult res;
    if (!(len > 0.0)) return res;
    const QuadratureOptions& o = ctx.opt;
    auto sig = [&](double x) { return eval_point(ctx, t, ut, x, front).sig; };

    // split [0, len] where the chain structure changes
    const std::size_t np = std::max<std::size_t>(o.probes, 2);
    std::vector<double> px(np);
    std::vector<std::uint64_t> ps(np);
    for (std::size_t j = 0; j < np; ++j) {
        px[j] = len * (static_cast<double>(j) + 0.5) / static_cast<double>(np);
        ps[j] = sig(px[j]);
    }
    std::vector<double> bp{0.0};
    const double xtol = 1e-14 * len;
    for (std::size_t j = 0; j + 1 < np; ++j) {
        double a = px[j];
        std::uint64_t sa = ps[j];
        const double b = px[j + 1];
        const std::uint64_t sb = ps[j + 1];
        int guard = 0;
        while (sa != sb && guard++ < 16) {
            double lo = a, hi = b;
            std::uint64_t shi = sb;
            while (hi - lo > xtol) {
                const double m = 0.5 * (lo + hi);
                if (m <= lo || m >= hi) break;
                const std::uint64_t sm = sig(m);
                if (sm == sa) {
                    lo = m;
                } else {
                    hi = m;
                    shi = sm;
                }
            }
            bp.push_back(0.5 * (lo + hi));
            a = hi;
            sa = shi;
        }
    }
    bp.push_back(len);
    std::vector<std::pair<double, double>> pieces;
    for (std::size_t k = 0; k + 1 < bp.size(); ++k)
        if (bp[k + 1] > bp[k]) pieces.emplace_back(bp[k], bp[k + 1]);
    res.pieces = pieces.size();

    std::vector<std::size_t> n(pieces.size());
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const double share = (pieces[k].second - pieces[k].first) / len;
        std::size_t m = static_cast<std::size_t>(std::ceil(static_cast<double>(o.nodes) * share));
        m = std::max<std::size_t>(m, 16);
        n[k] = m + (m & 1);
    }

    struct PieceSum {
        double total = 0.0;
        std::array<double, 3> region{0.0, 0.0, 0.0};
        std::size_t caps = 0;
    };
    auto rule = [&](std::size_t k, std::size_t m) {
        const GaussRule& g = gauss_legendre(m);
        const double a = pieces[k].first, b = pieces[k].second;
        const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
        PieceSum ps_;
        for (std::size_t i = 0; i < m; ++i) {
            const PointEval e = eval_point(ctx, t, ut, c + hw * g.x[i], front);
            const double v = g.w[i] * hw * e.value;
            ps_.total += v;
            ps_.region[e.region] += v;
            ps_.caps += e.cap_hit ? 1 : 0;
        }
        return ps_;
    };

    std::vector<PieceSum> coarse(pieces.size()), fine(pieces.size());
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        coarse[k] = rule(k, n[k] / 2);
        fine[k] = rule(k, n[k]);
    }
    for (;;) {
        double total = 0.0, err = 0.0;
        std::size_t used = 0;
        for (std::size_t k = 0; k < pieces.size(); ++k) {
            total += fine[k].total;
            err += std::abs(fine[k].total - coarse[k].total);
            used += n[k];
        }
        res.total = total;
        res.nodes = used;
        res.rel_err = total != 0.0 ? err / std::abs(total) : (err == 0.0 ? 0.0 : kInf);
        if (res.rel_err <= o.rel_tol) break;
        if (2 * used > o.max_nodes) {
            res.converged = false;
            break;
        }
        const double share_tol = o.rel_tol * std::abs(total) / static_cast<double>(pieces.size());
        bool any = false;
        for (std::size_t k = 0; k < pieces.size(); ++k) {
            if (std::abs(fine[k].total - coarse[k].total) <= share_tol) continue;
            coarse[k] = fine[k];
            n[k] *= 2;
            fine[k] = rule(k, n[k]);
            any = true;
        }
        if (!any) break;
    }
    res.region = {0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        for (int r = 0; r < 3; ++r) res.region[r] += fine[k].region[r];
        res.cap_hits += fine[k].caps;
    }
    return res;
}

double max_window_deficit(const VelocityHistory& h, double t) {
    double best = h.window_mean_deficit(0.0, t);
    if (h.monotone_until(t)) return best;
    const std::size_t m = last_node_before(h, t);
    for (std::size_t k = 1; k <= m; ++k) {
        const double s = h.time(k);
        if (s < t) best = std::max(best, h.window_mean_deficit(s, t));
    }
    return best;
}

}  // namespace

RecollisionBreakdown r_plus(const RecollisionContext& ctx, double t) {
    const VelocityHistory& h = *ctx.history;
    RecollisionBreakdown b;
    b.t = t;
    if (!(t > 0.0)) return b;
    const double ut = h.deficit_at(t);
    const double len = max_window_deficit(h, t) - ut;
    if (!(len > 0.0)) return b;
    const RangeResult r = integrate_range(ctx, t, ut, len, true);
    const double pref = recollision_prefactor(ctx.law.gas, ctx.law.body.radius);
    b.r_plus = pref * r.total;
    b.contrib_far = pref * r.region[0];
    b.contrib_mid = pref * r.region[1];
    b.contrib_trapped = pref * r.region[2];
    b.n_vx_nodes = r.nodes;
    b.rel_err = r.rel_err;
    b.converged = r.converged;
    b.cap_hits = r.cap_hits;
    b.n_pieces = r.pieces;
    return b;
}

RecollisionBreakdown r_minus(const RecollisionContext& ctx, double t) {
    const VelocityHistory& h = *ctx.history;
    RecollisionBreakdown b;
    b.t = t;
    if (!(t > 0.0) || t < h.summary().t0) return b;
    const double ut = h.deficit_at(t);
    const double len = ut - h.min_deficit_until(t);
    if (!(len > 0.0)) return b;
    const RangeResult r = integrate_range(ctx, t, ut, len, false);
    const double pref = recollision_prefactor(ctx.law.gas, ctx.law.body.radius);
    b.r_minus = pref * r.total;
    b.n_vx_nodes = r.nodes;
    b.rel_err = r.rel_err;
    b.converged = r.converged;
    b.cap_hits = r.cap_hits;
    b.n_pieces = r.pieces;
    return b;
}

RecollisionBreakdown evaluate(const RecollisionContext& ctx, double t) {
    RecollisionBreakdown p = r_plus(ctx, t);
    const RecollisionBreakdown m = r_minus(ctx, t);
    p.r_minus = m.r_minus;
    p.n_vx_nodes += m.n_vx_nodes;
    p.rel_err = std::max(p.rel_err, m.rel_err);
    p.converged = p.converged && m.converged;
    p.cap_hits += m.cap_hits;
    p.n_pieces += m.n_pieces;
    p.f0 = drag_f0(ctx.law, ctx.history->value_at(t));
    return p;
}

std::vector<RecollisionBreakdown> evaluate_table(const RecollisionContext& ctx,
                                                 const std::vector<double>& times,
                                                 std::size_t workers) {
    std::vector<RecollisionBreakdown> rows(times.size());
    parallel_for(times.size(), workers, [&](std::size_t i) { rows[i] = evaluate(ctx, times[i]); });
    return rows;
}

std::string breakdown_csv(const std::vector<RecollisionBreakdown>& rows) {
    std::string out = "t,r_plus,r_minus,contrib_far,contrib_mid,contrib_trapped\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.r_plus,
                      r.r_minus, r.contrib_far, r.contrib_mid, r.contrib_trapped);
        out += buf;
    }
    return out;
}

SingleRecollisionWindow single_recollision_window(const VelocityHistory& h, double t) {
    const EquilibriumSummary& eq = h.summary();
    SingleRecollisionWindow w;
    w.t = t;
    w.m1 = std::log(1.5) / eq.c_minus;
    w.m2 = std::log(4.0) / eq.c_plus;
    if (!(t > 0.0)) return w;
    // q in deficit form: gamma - 2u(s) + ubar_{s,t}
    auto q = [&](double s) {
        const double ub = s < t ? h.window_mean_deficit(s, t) : h.deficit_at(t);
        return eq.gamma - 2.0 * h.deficit_at(s) + ub;
    };
    if (!(q(0.0) < 0.0)) return w;
    double prev = 0.0;
    const std::size_t m = last_node_before(h, t);
    for (std::size_t k = 1; k <= m + 1; ++k) {
        const double s = k <= m ? h.time(k) : t;
        if (q(s) > 0.0) {
            w.s0 = bisect_pred([&](double x) { return q(x) <= 0.0; }, prev, s);
            w.found = true;
            w.valid = w.m1 <= w.s0 && w.s0 <= w.m2;
            return w;
        }
        prev = s;
    }
    return w;
}

}  // namespace cavitydrag
