#include "cavitydrag/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cavitydrag {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kVersion = CAVITYDRAG_VERSION;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// non-finite values become null in JSON
ojson jnum(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

ojson config_json(const SimConfig& cfg) {
    ojson j = ojson::object();
    j["preset"] = cfg.preset;
    for (const auto& [k, v] : parse_key_values(to_key_values(cfg))) {
        char* end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (!v.empty() && *end == '\0')
            j[k] = x;
        else
            j[k] = v;
    }
    j["resolved_v0"] = cfg.body.v0;
    j["resolved_barrier"] = cfg.body.barrier;
    return j;
}

std::string comment_header(const SimConfig& cfg) {
    std::string out = std::string("# cavitydrag ") + kVersion + "\n";
    if (!cfg.preset.empty()) out += "# preset = " + cfg.preset + "\n";
    std::stringstream ss(to_key_values(cfg));
    std::string line;
    while (std::getline(ss, line)) out += "# " + line + "\n";
    out += "# resolved_v0 = " + num(cfg.body.v0) + "\n";
    out += "# resolved_barrier = " + num(cfg.body.barrier) + "\n";
    return out;
}

ojson equilibrium_json(const EquilibriumSummary& e) {
    return ojson{{"v_inf", e.v_inf}, {"v0", e.v0},       {"c_plus", e.c_plus},
                 {"c_minus", e.c_minus}, {"gamma", e.gamma}, {"t0", e.t0}};
}

ojson trapping_json(const TrappingSummary& t) {
    return ojson{{"barrier", t.barrier},
                 {"f0_total", t.f0_total},
                 {"has_s_star", t.has_s_star},
                 {"s_star", jnum(t.s_star)},
                 {"s_minus", jnum(t.s_minus)},
                 {"s_plus", jnum(t.s_plus)},
                 {"theta_gamma", jnum(t.theta_gamma)},
                 {"alpha", t.alpha},
                 {"fitted_c", t.fitted_c},
                 {"tail_remainder", t.tail_remainder}};
}

ojson omega_json(const OmegaReport& o) {
    return ojson{{"alpha", o.alpha},
                 {"a_plus", o.a_plus},
                 {"ok_lower", o.ok_lower},
                 {"ok_upper", o.ok_upper},
                 {"ok_monotone", o.ok_monotone},
                 {"worst_margin", o.worst_margin},
                 {"n_lower_fail", o.n_lower_fail},
                 {"n_upper_fail", o.n_upper_fail},
                 {"n_monotone_fail", o.n_monotone_fail}};
}

ojson trace_json(const FixedPointRun& r) {
    return ojson{{"iterations", r.trace.distances.size()},
                 {"distances", r.trace.distances},
                 {"rel_distances", r.trace.rel_distances},
                 {"converged", r.trace.converged},
                 {"tail_converged", r.trace.tail_converged},
                 {"idempotence", r.idempotence},
                 {"omega", omega_json(r.trace.omega)}};
}

struct Writer {
    fs::path dir;
    std::vector<std::string>* files;
    void put(const std::string& name, const std::string& text) const {
        fs::create_directories(dir);
        const fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw Error("cannot write '" + p.string() + "'");
        out << text;
        files->push_back(p.string());
    }
    void put_json(const std::string& name, const ojson& j) const { put(name, j.dump(2) + "\n"); }
};

void check(bool ok, const std::string& what, std::vector<std::string>& violations) {
    if (!ok) violations.push_back(what);
}

// hard invariants of a fixed-point run
void check_fixed_point(const FixedPointRun& r, std::vector<std::string>& v, const std::string& tag) {
    const double tol = r.cfg.map_cfg.fp_tol;
    check(r.trace.converged, tag + "fixed point did not converge in sup norm", v);
    check(r.idempotence < tol, tag + "extra map application moved the solution by " + num(r.idempotence), v);
    check(r.fit.lower_ok, tag + "lower bound gamma e^{-C- t} violated at node " +
                              std::to_string(r.fit.lower_fail_index), v);
    const double t0 = r.eq.t0;
    for (const auto& row : r.table) {
        if (row.r_plus < 0.0 || row.r_minus < 0.0) {
            v.push_back(tag + "negative recollision term at t = " + num(row.t));
            break;
        }
        if (row.t < t0 && row.r_minus != 0.0) {
            v.push_back(tag + "r_minus nonzero before t0 at t = " + num(row.t));
            break;
        }
    }
}

void write_fixed_point(const FixedPointRun& r, const Writer& w, ojson& report) {
    const DragLaw law = DragLaw::make(r.cfg.gas, r.cfg.body);
    const std::string head = comment_header(r.cfg);
    w.put("trajectory.csv", head + trajectory_csv(r.trace.final, law, r.table));
    w.put("history.csv", head + history_csv(r.trace.final));
    w.put("recollision.csv", head + breakdown_csv(r.table));
    w.put("residual.gp", gnuplot_script("trajectory.csv", r.fit));
    report["equilibrium"] = equilibrium_json(r.eq);
    report["trapping"] = trapping_json(r.trapping);
    report["fit"] = ojson::parse(fit_json(r.fit));
    report["fit"]["r_plus_envelope_ratio"] =
        jnum(r_plus_envelope_ratio(r.table, r.fit.t_lo > 0.0 ? r.fit.t_lo : 0.5 * r.cfg.map_cfg.horizon,
                                   r.cfg.map_cfg.horizon));
    report["fixed_point"] = trace_json(r);
}

std::string fixed_point_summary(const FixedPointRun& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "V_inf           %.12g\n"
                  "C+ / C-         %.6g / %.6g\n"
                  "barrier h       %.6g  (f(0) = %.6g)\n"
                  "s* / s- / s+    %.6g / %.6g / %.6g\n"
                  "iterations      %zu  (last sup distance %.3g, idempotence %.3g)\n",
                  r.eq.v_inf, r.eq.c_plus, r.eq.c_minus, r.cfg.body.barrier, r.f0_total, r.trapping.s_star,
                  r.trapping.s_minus, r.trapping.s_plus, r.trace.distances.size(),
                  r.trace.distances.empty() ? 0.0 : r.trace.distances.back(), r.idempotence);
    return buf + fit_summary(r.fit);
}

RunResult run_autonomous(SimConfig cfg) {
    RunResult res;
    resolve(cfg);
    const DragLaw law = DragLaw::make(cfg.gas, cfg.body);
    const EquilibriumSummary eq = equilibrium_of(law);
    const VelocityHistory a = autonomous_solve(law, cfg.map_cfg);
    const double dt = cfg.map_cfg.dt;
    const double tol = 1e-8 + 10.0 * dt * dt * dt * dt;
    std::size_t n_env = 0, n_mono = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a.time(i);
        const double u = a.deficit(i);
        if (u < eq.gamma * std::exp(-eq.c_minus * t) - tol || u > eq.gamma * std::exp(-eq.c_plus * t) + tol) ++n_env;
        if (i > 0 && a.deficit(i) > a.deficit(i - 1)) ++n_mono;
    }
    check(n_env == 0, "autonomous envelope violated at " + std::to_string(n_env) + " nodes", res.violations);
    check(n_mono == 0, "V not monotone at " + std::to_string(n_mono) + " nodes", res.violations);

    const TrappingSummary ts = solve_s_star(a, cfg.body.barrier, cfg.map_cfg.alpha);
    std::vector<RecollisionBreakdown> rows;
    for (double t : subgrid_times(a, cfg.map_cfg.stride)) {
        RecollisionBreakdown b;
        b.t = t;
        b.f0 = drag_f0(law, a.value_at(t));
        rows.push_back(b);
    }
    Writer w{cfg.output_dir, &res.files};
    const std::string head = comment_header(cfg);
    w.put("trajectory.csv", head + trajectory_csv(a, law, rows));
    w.put("history.csv", head + history_csv(a));
    FitReport none;
    none.note = "autonomous run";
    w.put("residual.gp", gnuplot_script("trajectory.csv", none));
    ojson report;
    report["version"] = kVersion;
    report["scenario"] = to_string(cfg.scenario);
    report["config"] = config_json(cfg);
    report["equilibrium"] = equilibrium_json(eq);
    report["trapping"] = trapping_json(ts);
    report["envelope"] = ojson{{"tolerance", tol}, {"violations", n_env}, {"monotone_violations", n_mono}};
    report["violations"] = res.violations;
    w.put_json("report.json", report);

    char buf[256];
    std::snprintf(buf, sizeof buf, "V_inf %.12g, C+ %.6g, C- %.6g, envelope violations %zu\n", eq.v_inf, eq.c_plus,
                  eq.c_minus, n_env);
    res.summary = buf;
    return res;
}

RunResult run_single(SimConfig cfg) {
    RunResult res;
    const FixedPointRun r = run_fixed_point(cfg);
    check_fixed_point(r, res.violations, "");
    Writer w{r.cfg.output_dir, &res.files};
    ojson report;
    report["version"] = kVersion;
    report["scenario"] = to_string(r.cfg.scenario);
    report["config"] = config_json(r.cfg);
    write_fixed_point(r, w, report);
    res.summary = fixed_point_summary(r);

    if (r.cfg.scenario == Scenario::oracle_compare) {
        const DragLaw law = DragLaw::make(r.cfg.gas, r.cfg.body);
        const RecollisionContext ctx = make_context(r.trace.final, law, r.cfg.map_cfg.quad);
        ojson rows = ojson::array();
        res.summary += "\n      t  quad r+ + r-   oracle exact  se         necessary     gap\n";
        for (double t : r.cfg.oracle_times) {
            OracleOptions opt;
            opt.n_samples = r.cfg.oracle_samples;
            opt.seed = r.cfg.seed;
            opt.workers = r.cfg.map_cfg.workers;
            const OracleEstimate full = friction_mc(r.trace.final, law, t, opt);
            opt.truncate = true;
            const OracleEstimate bare = friction_mc(r.trace.final, law, t, opt);
            const RecollisionBreakdown q = evaluate(ctx, t);
            const double quad = q.r_plus + q.r_minus;
            const double f0 = drag_f0(law, r.trace.final.value_at(t));
            ojson row;
            row["t"] = t;
            row["quadrature"] = ojson{{"f0", q.f0}, {"r_plus", q.r_plus}, {"r_minus", q.r_minus}, {"sum", quad}};
            row["oracle"] = ojson::parse(oracle_json(full));
            row["oracle_truncated"] = ojson::parse(oracle_json(bare));
            row["truncated_z"] = (bare.estimate - f0) / bare.stderr_total;
            row["exact_z"] = (full.recollision() - quad) / full.recollision_stderr();
            rows.push_back(row);
            char buf[256];
            std::snprintf(buf, sizeof buf, "%7.3f  %.6e  %.6e  %.3e  %.6e  %.3e\n", t, quad, full.recollision(),
                          full.recollision_stderr(), full.necessary_front + full.rec_back, full.gap);
            res.summary += buf;
        }
        w.put_json("oracle.json", ojson{{"version", kVersion}, {"config", config_json(r.cfg)}, {"rows", rows}});
    }
    report["violations"] = res.violations;
    w.put_json("report.json", report);
    return res;
}

struct SuiteEntry {
    const char* preset;
    double lo, hi;
};

RunResult run_suite(const SimConfig& cfg) {
    RunResult res;
    const SuiteEntry entries[] = {
        {"disk3d", 4.5, 5.5}, {"disk2d", 3.5, 4.5}, {"cylinder-trapped", 2.6, 3.4}, {"box-trapped", 2.6, 3.4}};
    ojson table = ojson::array();
    std::string csv = comment_header(cfg) + "preset,dim,barrier,exponent,exponent_ci,t_lo,t_hi,expected_lo,expected_hi,in_band\n";
    res.summary = "preset              exponent   95% band     expected\n";
    for (const auto& e : entries) {
        SimConfig c = preset(e.preset);
        c.map_cfg = cfg.map_cfg;
        c.gamma = cfg.gamma;
        c.surface_tol = cfg.surface_tol;
        c.seed = cfg.seed;
        c.fit_t_lo = cfg.fit_t_lo;
        c.fit_t_hi = cfg.fit_t_hi;
        c.scenario = Scenario::fixed_point;
        c.output_dir = (fs::path(cfg.output_dir) / e.preset).string();
        const FixedPointRun r = run_fixed_point(c);
        check_fixed_point(r, res.violations, std::string(e.preset) + ": ");
        Writer w{r.cfg.output_dir, &res.files};
        ojson report;
        report["version"] = kVersion;
        report["scenario"] = to_string(r.cfg.scenario);
        report["config"] = config_json(r.cfg);
        write_fixed_point(r, w, report);
        w.put_json("report.json", report);
        const bool in_band = r.fit.fitted && r.fit.exponent >= e.lo && r.fit.exponent <= e.hi;
        table.push_back(ojson{{"preset", e.preset},
                              {"dim", r.cfg.gas.dim},
                              {"barrier", r.cfg.body.barrier},
                              {"fit", report["fit"]},
                              {"expected", ojson::array({e.lo, e.hi})},
                              {"in_band", in_band}});
        csv += std::string(e.preset) + "," + std::to_string(r.cfg.gas.dim) + "," + num(r.cfg.body.barrier) + "," +
               num(r.fit.exponent) + "," + num(r.fit.exponent_ci) + "," + num(r.fit.t_lo) + "," + num(r.fit.t_hi) +
               "," + num(e.lo) + "," + num(e.hi) + "," + (in_band ? "1" : "0") + "\n";
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-18s  %8.4f   +- %-8.4f  [%.1f, %.1f]%s\n", e.preset, r.fit.exponent,
                      r.fit.exponent_ci, e.lo, e.hi, in_band ? "" : "  outside");
        res.summary += buf;
    }
    Writer w{cfg.output_dir, &res.files};
    w.put("exponents.csv", csv);
    w.put_json("report.json", ojson{{"version", kVersion},
                                    {"scenario", to_string(cfg.scenario)},
                                    {"config", config_json(cfg)},
                                    {"exponents", table},
                                    {"violations", res.violations}});
    return res;
}

}  // namespace

FixedPointRun run_fixed_point(SimConfig cfg) {
    FixedPointRun r;
    r.f0_total = resolve(cfg);
    r.cfg = cfg;
    const DragLaw law = DragLaw::make(cfg.gas, cfg.body);
    r.eq = equilibrium_of(law);
    r.trace = fixed_point(law, cfg.map_cfg);
    const VelocityHistory& fin = r.trace.final;

    MapResult again = map_apply(fin, law, cfg.map_cfg);
    double d = 0.0;
    for (std::size_t i = 0; i < fin.size(); ++i) d = std::max(d, std::abs(again.history.deficit(i) - fin.deficit(i)));
    r.idempotence = d;
    r.table = std::move(again.table);

    r.trapping = solve_s_star(fin, cfg.body.barrier, cfg.map_cfg.alpha);
    double lo = cfg.fit_t_lo, hi = cfg.fit_t_hi;
    bool ok = true;
    if (!(lo > 0.0 && hi > 0.0)) {
        const FitWindow fw = default_fit_window(fin, cfg.body.barrier);
        if (!(lo > 0.0)) lo = fw.t_lo;
        if (!(hi > 0.0)) hi = fw.t_hi;
        ok = fw.ok || cfg.fit_t_lo > 0.0;
    }
    if (ok && lo < hi) {
        r.fit = tail_exponent(fin, lo, hi);
    } else {
        r.fit.refused = true;
        r.fit.t_lo = lo;
        r.fit.t_hi = hi;
        r.fit.note = "fit window too short";
    }
    verify_thm31(fin, r.fit);
    verify_thm32(fin, r.table, r.fit);
    return r;
}

std::string trajectory_csv(const VelocityHistory& h, const DragLaw& law,
                           const std::vector<RecollisionBreakdown>& table) {
    std::string out = "t,V,V_inf_minus_V,F0,r_plus,r_minus\n";
    for (const auto& row : table) {
        const double u = h.deficit_at(row.t);
        const double v = h.v_inf() - u;
        out += num(row.t) + "," + num(v) + "," + num(u) + "," + num(drag_f0(law, v)) + "," + num(row.r_plus) + "," +
               num(row.r_minus) + "\n";
    }
    return out;
}

std::string gnuplot_script(const std::string& csv_name, const FitReport& fit) {
    std::string s = std::string("# cavitydrag ") + kVersion + "\n";
    s += "set datafile separator ','\n"
         "set datafile commentschars '#'\n"
         "set terminal pngcairo size 900,600\n"
         "set output 'residual.png'\n"
         "set logscale xy\n"
         "set format y '%.0e'\n"
         "set xlabel 't'\n"
         "set ylabel 'V_inf - V'\n"
         "set key bottom left\n";
    s += "plot '" + csv_name + "' every ::1 using 1:3 with lines lw 2 title 'V_inf - V', \\\n";
    s += "     '' every ::1 using 1:($5 > 0 ? $5 : NaN) with lines title 'r_plus'";
    if (fit.fitted) {
        s += ", \\\n     [" + num(fit.t_lo) + ":" + num(fit.t_hi) + "] " + num(fit.coefficient) + " * x**(-" +
             num(fit.exponent) + ") with lines dt 2 lw 2 title sprintf('fit t^{-%.2f}', " + num(fit.exponent) + ")";
    }
    s += "\n";
    return s;
}

RunResult run(SimConfig cfg) {
    cfg.validate();
    RunResult res;
    switch (cfg.scenario) {
        case Scenario::autonomous: res = run_autonomous(cfg); break;
        case Scenario::fixed_point:
        case Scenario::oracle_compare: res = run_single(cfg); break;
        case Scenario::exponent_suite: res = run_suite(cfg); break;
    }
    res.exit_code = res.violations.empty() ? 0 : 1;
    return res;
}

}  // namespace cavitydrag
