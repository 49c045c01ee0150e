#include "cavitydrag/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include <boost/math/special_functions/erf.hpp>

#include "cavitydrag/parallel.hpp"
#include "cavitydrag/recollision.hpp"
#include "cavitydrag/rng.hpp"
#include "cavitydrag/trapping.hpp"

namespace cavitydrag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

inline int sgn(double x) { return (x > 0.0) - (x < 0.0); }

// Free flight plus reflections along one time direction.
class Walker {
public:
    Walker(const VelocityHistory& h, const BodyGeometry& body, int dir, double tau,
           const RelativeState& s, double limit)
        : h_(h), radius_(body.radius), barrier_(body.barrier), dir_(dir), limit_(limit), tau_(tau), s_(s) {
        umax_ = h.gamma() * (1.0 + 1e-9);
    }

    void set_on_base(int side) {
        on_base_ = true;
        base_side_ = side;
    }

    double tau() const { return tau_; }
    const RelativeState& state() const { return s_; }

    // Advances to the next reflection; false once the limit is reached.
    bool step(TraceEvent& ev) {
        for (;;) {
            if (dir_ * (limit_ - tau_) <= 0.0) return false;
            const std::optional<double> side = side_crossing();
            const double stop = side ? *side : limit_;
            int side_after = 0;
            const std::optional<double> base = base_crossing(stop, side_after);
            if (base) {
                const double r = *base;
                const double w_old = s_.w;
                const double w_new = 2.0 * h_.deficit_at(r) - w_old;
                s_.x_perp = s_.x_perp + s_.v_perp * (r - tau_);
                ev = TraceEvent{};
                ev.time = r;
                ev.kind = EventKind::base;
                ev.w_pre = dir_ > 0 ? w_old : w_new;
                ev.w_post = dir_ > 0 ? w_new : w_old;
                ev.v_perp_pre = ev.v_perp_post = s_.v_perp;
                ev.y = 0.0;
                ev.x_perp = s_.x_perp;
                s_.w = w_new;
                s_.y = 0.0;
                tau_ = r;
                on_base_ = true;
                base_side_ = side_after;
                on_side_ = false;
                return true;
            }
            if (!side) {
                move_to(limit_);
                return false;
            }
            const double ts = *side;
            const double ys = yat(ts);
            move_to(ts);
            s_.y = ys;
            on_side_ = true;
            if (barrier_ > 0.0 && ys >= 0.0 && ys <= barrier_) {
                const Perp before = s_.v_perp;
                const Perp after = mirror_perp(before, s_.x_perp);
                ev = TraceEvent{};
                ev.time = ts;
                ev.kind = EventKind::side;
                ev.w_pre = ev.w_post = s_.w;
                ev.v_perp_pre = dir_ > 0 ? before : after;
                ev.v_perp_post = dir_ > 0 ? after : before;
                ev.y = ys;
                ev.x_perp = s_.x_perp;
                s_.v_perp = after;
                return true;
            }
            // no wall at this height: the particle just crosses the cylinder
        }
    }

private:
    double yat(double x) const { return s_.y + h_.integral(tau_, x) - (x - tau_) * s_.w; }

    void move_to(double x) {
        if (x == tau_) return;
        s_.y = yat(x);
        s_.x_perp = s_.x_perp + s_.v_perp * (x - tau_);
        tau_ = x;
        on_base_ = false;
        on_side_ = false;
    }

    // nearest crossing of |x_perp| = R ahead in time, within the limit
    std::optional<double> side_crossing() const {
        const Perp& x = s_.x_perp;
        const Perp& v = s_.v_perp;
        const double a = v.dot(v);
        if (!(a > 0.0)) return std::nullopt;
        const double b = 2.0 * x.dot(v);
        double r1, r2;
        if (on_side_) {
            r1 = 0.0;
            r2 = -b / a;
        } else {
            const double c = x.dot(x) - radius_ * radius_;
            const double disc = b * b - 4.0 * a * c;
            if (disc < 0.0) return std::nullopt;
            const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            r1 = q / a;
            r2 = q != 0.0 ? c / q : -r1;
        }
        double best = kInf;
        for (double r : {r1, r2}) {
            const double d = dir_ * r;
            if (d > 0.0 && d < best) best = d;
        }
        if (!std::isfinite(best)) return std::nullopt;
        const double ts = tau_ + dir_ * best;
        if (ts == tau_ || dir_ * (ts - limit_) >= 0.0) return std::nullopt;
        return ts;
    }

    double next_node(double p) const {
        const double dt = h_.dt();
        const double k = p / dt;
        double node;
        if (dir_ > 0) {
            node = (std::floor(k) + 1.0) * dt;
            if (node <= p) node += dt;
        } else {
            node = (std::ceil(k) - 1.0) * dt;
            if (node >= p) node -= dt;
        }
        return node;
    }

    // latest/earliest plane crossing y = 0 inside the disk before stop
    std::optional<double> base_crossing(double stop, int& side_after) const {
        const double lip = std::max(std::abs(s_.w), std::abs(umax_ - s_.w)) + 1e-300;
        double p = tau_;
        int sp = on_base_ ? base_side_ : sgn(s_.y);
        if (sp == 0) sp = sgn(dir_ * (h_.deficit_at(tau_) - s_.w));
        if (sp == 0) return std::nullopt;  // comoving with the base
        bool first = true;
        while (dir_ * (stop - p) > 0.0) {
            const double fp = first ? s_.y : yat(p);
            const double jump = (first && on_base_) ? 0.0 : std::abs(fp) / lip;
            double q = p + dir_ * std::max(jump, std::abs(next_node(p) - p));
            if (dir_ * (q - stop) > 0.0) q = stop;
            const double fq = yat(q);
            const int sq = sgn(fq);
            if (sq != sp) {
                double r = q;
                if (sq != 0) {
                    double lo = p, hi = q;
                    for (int it = 0; it < 200; ++it) {
                        const double m = 0.5 * (lo + hi);
                        if (m == lo || m == hi) break;
                        if (sgn(yat(m)) == sp)
                            lo = m;
                        else
                            hi = m;
                    }
                    r = hi;
                }
                const Perp xr = s_.x_perp + s_.v_perp * (r - tau_);
                if (xr.norm() <= radius_) {
                    side_after = sp;
                    return r;
                }
                sp = sq != 0 ? sq : -sp;
            }
            p = q;
            first = false;
        }
        return std::nullopt;
    }

    const VelocityHistory& h_;
    double radius_, barrier_;
    int dir_;
    double limit_;
    double tau_;
    RelativeState s_;
    double umax_ = 0.0;
    bool on_base_ = false;
    int base_side_ = 0;
    bool on_side_ = false;
};

}  // namespace

BackwardTrace trace_backward_relative(const VelocityHistory& h, const BodyGeometry& body, double t,
                                      const RelativeState& p, std::size_t max_events, bool on_base,
                                      bool front) {
    if (!(t >= 0.0) || t > h.horizon() * (1.0 + 1e-12)) throw Error("trace time outside the history");
    BackwardTrace out;
    Walker wk(h, body, -1, t, p, 0.0);
    if (on_base) wk.set_on_base(front ? 1 : -1);
    TraceEvent ev;
    for (;;) {
        if (out.events.size() >= max_events) {
            out.overflow = true;
            break;
        }
        if (!wk.step(ev)) break;
        out.events.push_back(ev);
        if (ev.kind == EventKind::base)
            ++out.n_base;
        else
            ++out.n_side;
    }
    out.start = wk.state();
    out.stop_time = wk.tau();
    out.w0 = out.start.w;
    out.v0x = h.v_inf() - out.w0;
    out.v0_perp = out.start.v_perp;
    return out;
}

BackwardTrace trace_backward(const VelocityHistory& h, const BodyGeometry& body, double t,
                             const ParticleState& p, std::size_t max_events) {
    RelativeState r;
    r.y = p.x - h.position(t);
    r.x_perp = p.x_perp;
    r.w = h.v_inf() - p.v_x;
    r.v_perp = p.v_perp;
    const bool on_base = r.y == 0.0;
    return trace_backward_relative(h, body, t, r, max_events, on_base, p.v_x < h.value_at(t));
}

ForwardTrace trace_forward(const VelocityHistory& h, const BodyGeometry& body, double t_from,
                           double t_to, const RelativeState& p, std::size_t max_events,
                           double end_guard) {
    if (!(t_to >= t_from)) throw Error("forward trace needs t_to >= t_from");
    ForwardTrace out;
    const double stop = std::max(t_from, t_to - end_guard);
    Walker wk(h, body, 1, t_from, p, stop);
    TraceEvent ev;
    for (;;) {
        if (out.events.size() >= max_events) {
            out.overflow = true;
            break;
        }
        if (!wk.step(ev)) break;
        out.events.push_back(ev);
        if (ev.kind == EventKind::base)
            ++out.n_base;
        else
            ++out.n_side;
    }
    // free flight over the guard band
    RelativeState s = wk.state();
    const double from = wk.tau();
    if (t_to > from) {
        s.y += h.integral(from, t_to) - (t_to - from) * s.w;
        s.x_perp = s.x_perp + s.v_perp * (t_to - from);
    }
    out.end = s;
    return out;
}

double OracleEstimate::recollision_stderr() const {
    return std::hypot(rec_front_stderr, rec_back_stderr);
}

namespace {

inline double gaussian(CounterRng& g, double beta) {
    return boost::math::erf_inv(2.0 * g.uniform() - 1.0) / std::sqrt(beta);
}

// e^{-b(V-wk)^2} - e^{-b(V-w)^2}
inline double gauss_diff(double beta, double vinf, double w, double wk) {
    const double v = vinf - w;
    return std::exp(-beta * v * v) * std::expm1(-beta * (w - wk) * (2.0 * vinf - w - wk));
}

// time-0 deficit under the |v_perp| Delta <= 2R acceptance
double necessary_w0(const VelocityHistory& h, const BodyGeometry& body, double t, double w,
                    double vperp) {
    double tc = t, wc = w, r = kInf;
    for (int depth = 0; depth < 64; ++depth) {
        const auto s = recollision_time_deficit(h, tc, wc);
        if (!s || *s <= 0.0) break;
        if (wc > h.deficit_at(tc)) {
            const double dl = escape_delta(h, *s, tc, body.barrier);
            if (dl > 0.0) r = std::min(r, 2.0 * body.radius / dl);
        }
        if (vperp > r) break;
        wc = 2.0 * h.deficit_at(*s) - wc;
        tc = *s;
    }
    return wc;
}

Perp sample_disk(CounterRng& g, int dim, double radius) {
    Perp p;
    if (dim == 2) {
        p.c[0] = radius * (2.0 * g.uniform() - 1.0);
        return p;
    }
    const double r = radius * std::sqrt(g.uniform());
    const double phi = 2.0 * kPi * g.uniform();
    p.c[0] = r * std::cos(phi);
    p.c[1] = r * std::sin(phi);
    return p;
}

Perp sample_vperp(CounterRng& g, int dim, double beta) {
    Perp v;
    v.c[0] = gaussian(g, beta);
    if (dim == 3) v.c[1] = gaussian(g, beta);
    return v;
}

// Stratified pairs: sum of means and sum of squared half-differences.
struct PairSum {
    double mean = 0.0;
    double var = 0.0;
    void add(double a, double b) {
        mean += 0.5 * (a + b);
        var += 0.25 * (a - b) * (a - b);
    }
    void merge(const PairSum& o) {
        mean += o.mean;
        var += o.var;
    }
};

struct WindowResult {
    PairSum exact, necessary, gap;
    std::size_t overflows = 0;
    std::size_t max_depth = 0;
};

WindowResult sample_window(const VelocityHistory& h, const DragLaw& law, double t, bool front,
                           double lo, double len, std::size_t strata, const OracleOptions& opt) {
    const GasParams& gas = law.gas;
    const BodyGeometry& body = law.body;
    const double ut = h.deficit_at(t);
    const double vinf = h.v_inf();
    const double tm = transverse_mass(gas);
    const std::size_t chunk = 256;
    const std::size_t n_chunks = (strata + chunk - 1) / chunk;
    std::vector<WindowResult> parts(n_chunks);
    parallel_for(n_chunks, opt.workers, [&](std::size_t c) {
        WindowResult& res = parts[c];
        const std::size_t end = std::min(strata, (c + 1) * chunk);
        for (std::size_t j = c * chunk; j < end; ++j) {
            double val[2], nec[2];
            for (int k = 0; k < 2; ++k) {
                CounterRng g(opt.seed, front ? 11 : 12, 2 * j + static_cast<std::size_t>(k));
                const double w = lo + len * (static_cast<double>(j) + g.uniform()) / static_cast<double>(strata);
                RelativeState p;
                p.x_perp = sample_disk(g, gas.dim, body.radius);
                p.v_perp = sample_vperp(g, gas.dim, gas.beta);
                p.w = w;
                const BackwardTrace tr = trace_backward_relative(h, body, t, p, opt.max_events, true, front);
                if (tr.overflow) ++res.overflows;
                res.max_depth = std::max(res.max_depth, tr.n_base);
                const double delta = w - ut;
                const double sgn_part = front ? 1.0 : -1.0;
                val[k] = sgn_part * tm * delta * delta * gauss_diff(gas.beta, vinf, w, tr.w0);
                const double wn = necessary_w0(h, body, t, w, p.v_perp.norm());
                nec[k] = sgn_part * tm * delta * delta * gauss_diff(gas.beta, vinf, w, wn);
            }
            res.exact.add(val[0], val[1]);
            res.necessary.add(nec[0], nec[1]);
            res.gap.add(nec[0] - val[0], nec[1] - val[1]);
        }
    });
    WindowResult total;
    for (const auto& p : parts) {
        total.exact.merge(p.exact);
        total.necessary.merge(p.necessary);
        total.gap.merge(p.gap);
        total.overflows += p.overflows;
        total.max_depth = std::max(total.max_depth, p.max_depth);
    }
    return total;
}

// value and standard error of pref * len * mean
void finish_pair(const PairSum& s, std::size_t strata, double scale, double& value, double& err) {
    const double m = static_cast<double>(strata);
    value = scale * s.mean / m;
    err = scale * std::sqrt(s.var) / m;
}

double max_window_mean_deficit(const VelocityHistory& h, double t) {
    double best = h.window_mean_deficit(0.0, t);
    std::size_t i;
    double th;
    h.locate(t, i, th);
    const std::size_t last = th > 0.0 ? i : (i == 0 ? 0 : i - 1);
    for (std::size_t k = 1; k <= last; ++k) best = std::max(best, h.window_mean_deficit(h.time(k), t));
    return best;
}

}  // namespace

OracleEstimate friction_mc(const VelocityHistory& h, const DragLaw& law, double t,
                           const OracleOptions& opt) {
    if (opt.n_samples < 1000) throw Error("friction_mc needs at least 1000 samples");
    if (!(t >= 0.0) || t > h.horizon() * (1.0 + 1e-12)) throw Error("oracle time outside the history");
    const GasParams& gas = law.gas;
    OracleEstimate e;
    e.t = t;
    e.n_samples = opt.n_samples;
    e.seed = opt.seed;
    e.truncated = opt.truncate;
    const std::size_t strata = opt.n_samples / 2;
    const double v = h.value_at(t);

    // F0 part: v_x over equal-probability Gaussian strata
    {
        const double a = law.a_const * std::sqrt(kPi / gas.beta);
        PairSum s;
        for (std::size_t j = 0; j < strata; ++j) {
            double f[2];
            for (int k = 0; k < 2; ++k) {
                CounterRng g(opt.seed, 10, 2 * j + static_cast<std::size_t>(k));
                const double q = (static_cast<double>(j) + g.uniform()) / static_cast<double>(strata);
                const double vx = boost::math::erf_inv(2.0 * q - 1.0) / std::sqrt(gas.beta);
                const double d = vx - v;
                f[k] = (vx < v ? 1.0 : -1.0) * d * d;
            }
            s.add(f[0], f[1]);
        }
        finish_pair(s, strata, a, e.f0_part, e.f0_stderr);
    }

    if (!opt.truncate && t > 0.0) {
        const double pref = recollision_prefactor(gas, law.body.radius);
        const double ut = h.deficit_at(t);
        const double len_f = max_window_mean_deficit(h, t) - ut;
        if (len_f > 0.0) {
            const WindowResult r = sample_window(h, law, t, true, ut, len_f, strata, opt);
            finish_pair(r.exact, strata, pref * len_f, e.rec_front, e.rec_front_stderr);
            finish_pair(r.necessary, strata, pref * len_f, e.necessary_front, e.necessary_front_stderr);
            finish_pair(r.gap, strata, pref * len_f, e.gap, e.gap_stderr);
            e.overflows += r.overflows;
            e.max_depth = std::max(e.max_depth, r.max_depth);
        }
        const double len_b = ut - h.min_deficit_until(t);
        if (len_b > 0.0) {
            const WindowResult r = sample_window(h, law, t, false, ut - len_b, len_b, strata, opt);
            finish_pair(r.exact, strata, pref * len_b, e.rec_back, e.rec_back_stderr);
            e.overflows += r.overflows;
            e.max_depth = std::max(e.max_depth, r.max_depth);
        }
    }
    e.estimate = e.f0_part + e.rec_front + e.rec_back;
    e.stderr_total = std::sqrt(e.f0_stderr * e.f0_stderr + e.rec_front_stderr * e.rec_front_stderr +
                               e.rec_back_stderr * e.rec_back_stderr);
    return e;
}

std::string oracle_json(const OracleEstimate& e) {
    char buf[1024];
    std::snprintf(buf, sizeof buf,
                  "{\"t\": %.17g, \"estimate\": %.17g, \"stderr\": %.17g, \"f0_part\": %.17g, "
                  "\"f0_stderr\": %.17g, \"rec_front\": %.17g, \"rec_front_stderr\": %.17g, "
                  "\"rec_back\": %.17g, \"rec_back_stderr\": %.17g, \"necessary_front\": %.17g, "
                  "\"gap\": %.17g, \"gap_stderr\": %.17g, \"seed\": %llu, \"n_samples\": %zu, "
                  "\"truncated\": %s, \"overflows\": %zu}",
                  e.t, e.estimate, e.stderr_total, e.f0_part, e.f0_stderr, e.rec_front,
                  e.rec_front_stderr, e.rec_back, e.rec_back_stderr, e.necessary_front, e.gap,
                  e.gap_stderr, static_cast<unsigned long long>(e.seed), e.n_samples,
                  e.truncated ? "true" : "false", e.overflows);
    return buf;
}

bool in_omega_plus(const VelocityHistory& h, const BodyGeometry& body, double t, double dt_small,
                   const RelativeState& p) {
    const double rel = p.w - h.deficit_at(t);  // V - v_x
    if (rel < 0.0) return false;
    return p.y >= 0.0 && p.y <= rel * dt_small && p.x_perp.norm() < body.radius;
}

bool in_omega_minus(const VelocityHistory& h, const BodyGeometry& body, double t, double dt_small,
                    const RelativeState& p) {
    const double rel = h.deficit_at(t) - p.w;  // v_x - V
    if (rel < 0.0) return false;
    if (!(p.y <= 0.0 && p.y >= -rel * dt_small)) return false;
    const double delta = rel > 0.0 ? -p.y / rel : 0.0;
    return (p.x_perp + p.v_perp * delta).norm() < body.radius;
}

bool hits_base(const VelocityHistory& h, const BodyGeometry& body, double t, double dt_small,
               const RelativeState& p) {
    const double end = std::min(t + dt_small, h.horizon());
    const ForwardTrace f = trace_forward(h, body, t, end, p, 64);
    for (const auto& ev : f.events)
        if (ev.kind == EventKind::base) return true;
    return false;
}

namespace {

// G(x) = int_t^x (w - u): how far the base gains on a particle of deficit w
double gain(const VelocityHistory& h, double t, double x, double w) {
    return (x - t) * w - h.integral(t, x);
}

// points of [t, t+d] where w - u changes sign, plus the cell nodes and ends
std::vector<double> critical_points(const VelocityHistory& h, double t, double d, double w) {
    std::vector<double> pts{t, t + d};
    const double dt = h.dt();
    std::size_t i;
    double th;
    h.locate(t, i, th);
    for (std::size_t k = i; k + 1 < h.size(); ++k) {
        const double a = h.time(k);
        if (a > t + d) break;
        if (a > t) pts.push_back(a);
        const double ua = h.deficit(k), ub = h.deficit(k + 1);
        if ((ua - w) * (ub - w) < 0.0) {
            const double x = a + dt * (w - ua) / (ub - ua);
            if (x > t && x < t + d) pts.push_back(x);
        }
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

// parameter interval in [0, d] where |x + v s| <= R
bool disk_window(const Perp& x, const Perp& v, double radius, double d, double& lo, double& hi) {
    const double a = v.dot(v), b = 2.0 * x.dot(v), c = x.dot(x) - radius * radius;
    if (!(a > 0.0)) {
        if (c > 0.0) return false;
        lo = 0.0;
        hi = d;
        return true;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return false;
    const double sq = std::sqrt(disc);
    lo = std::max(0.0, (-b - sq) / (2.0 * a));
    hi = std::min(d, (-b + sq) / (2.0 * a));
    return hi > lo;
}

struct RegionSample {
    double measure = 0.0;
    double miss = 0.0;
};

RegionSample region_sample(const VelocityHistory& h, const BodyGeometry& body, double t, double d,
                           double w, const Perp& x, const Perp& v, double weight) {
    RegionSample out;
    const double ut = h.deficit_at(t);
    // front: y in [0, (w-ut) d] against y in [0, max G]
    if (x.norm() < body.radius) {
        const double a_len = std::max(0.0, (w - ut) * d);
        double gmax = 0.0;
        for (double p : critical_points(h, t, d, w)) gmax = std::max(gmax, gain(h, t, p, w));
        out.measure += weight * a_len;
        out.miss += weight * std::abs(a_len - gmax);
    }
    // back: both sets are intervals of |y|
    const double rel = ut - w;
    if (rel > 0.0) {
        double a_lo = 0.0, a_hi = 0.0, b_lo = 0.0, b_hi = 0.0;
        double s_lo, s_hi;
        double a_len = 0.0;
        if (disk_window(x, v, body.radius, d, s_lo, s_hi)) {
            a_lo = rel * s_lo;
            a_hi = rel * s_hi;
            a_len = a_hi - a_lo;
        }
        // first crossing times stay monotone up to the first stop of -G
        double peak = t + d;
        for (double p : critical_points(h, t, d, w)) {
            if (p > t && h.deficit_at(p) <= w) {
                peak = p;
                break;
            }
        }
        double b_len = 0.0;
        if (disk_window(x, v, body.radius, peak - t, s_lo, s_hi)) {
            b_lo = -gain(h, t, t + s_lo, w);
            b_hi = -gain(h, t, t + s_hi, w);
            b_len = std::max(0.0, b_hi - b_lo);
        }
        const double overlap = std::max(0.0, std::min(a_hi, b_hi) - std::max(a_lo, b_lo));
        out.measure += weight * a_len;
        out.miss += weight * (a_len + b_len - 2.0 * (a_len > 0.0 && b_len > 0.0 ? overlap : 0.0));
    }
    return out;
}

}  // namespace

OmegaRegionReport omega_region_check(const VelocityHistory& h, const BodyGeometry& body,
                                     const GasParams& gas, double t, double dt_small,
                                     std::size_t n_samples, std::uint64_t seed) {
    if (!(dt_small > 0.0)) throw Error("dt_small must be positive");
    if (t + dt_small > h.horizon()) throw Error("region check runs past the horizon");
    OmegaRegionReport rep;
    rep.t = t;
    rep.dt_small = dt_small;
    rep.n_samples = n_samples;
    const double beta = gas.beta;
    double measure_half = 0.0;
    const double ut = h.deficit_at(t);
    for (std::size_t j = 0; j < n_samples; ++j) {
        CounterRng g(seed, 20, j);
        const double w = h.v_inf() - gaussian(g, beta);
        const Perp v = sample_vperp(g, gas.dim, beta);
        // x_perp over a disk wide enough for the backward region
        const double rs = body.radius + v.norm() * dt_small;
        const Perp x = sample_disk(g, gas.dim, rs);
        const double weight = gas.dim == 2 ? rs / body.radius : (rs / body.radius) * (rs / body.radius);
        const RegionSample full = region_sample(h, body, t, dt_small, w, x, v, weight);
        const RegionSample half = region_sample(h, body, t, 0.5 * dt_small, w, x, v, weight);
        rep.measure += full.measure;
        rep.misclassified += full.miss;
        rep.misclassified_half += half.miss;
        if (w < ut) {
            RelativeState p;
            p.y = 0.5 * (ut - w) * dt_small;
            p.x_perp = x;
            p.w = w;
            p.v_perp = v;
            if (in_omega_plus(h, body, t, dt_small, p)) ++rep.sign_violations;
        }
        measure_half += half.measure;
    }
    rep.fraction = rep.measure > 0.0 ? rep.misclassified / rep.measure : 0.0;
    rep.fraction_half = measure_half > 0.0 ? rep.misclassified_half / measure_half : 0.0;
    rep.ratio = rep.fraction > 0.0 ? rep.fraction_half / rep.fraction : 0.0;
    return rep;
}

}  // namespace cavitydrag
