#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cavitydrag/analysis.hpp"
#include "cavitydrag/config.hpp"
#include "cavitydrag/dynamics.hpp"
#include "cavitydrag/oracle.hpp"
#include "cavitydrag/scenario.hpp"
#include "cavitydrag/trapping.hpp"

namespace py = pybind11;
using namespace cavitydrag;

namespace {

SimConfig make_config(const std::string& preset_name, const std::map<std::string, std::string>& overrides) {
    SimConfig cfg;
    KeyValues kv(overrides.begin(), overrides.end());
    if (!preset_name.empty()) kv["preset"] = preset_name;
    apply_keys(cfg, kv);
    cfg.validate();
    return cfg;
}

py::dict equilibrium_dict(const EquilibriumSummary& e) {
    py::dict d;
    d["v_inf"] = e.v_inf;
    d["v0"] = e.v0;
    d["c_plus"] = e.c_plus;
    d["c_minus"] = e.c_minus;
    d["gamma"] = e.gamma;
    d["t0"] = e.t0;
    return d;
}

py::dict trapping_dict(const TrappingSummary& t) {
    py::dict d;
    d["barrier"] = t.barrier;
    d["f0_total"] = t.f0_total;
    d["has_s_star"] = t.has_s_star;
    d["s_star"] = t.s_star;
    d["s_minus"] = t.s_minus;
    d["s_plus"] = t.s_plus;
    d["theta_gamma"] = t.theta_gamma;
    return d;
}

py::dict fit_dict(const FitReport& r) {
    py::dict d;
    d["exponent"] = r.exponent;
    d["exponent_ci"] = r.exponent_ci;
    d["coefficient"] = r.coefficient;
    d["t_lo"] = r.t_lo;
    d["t_hi"] = r.t_hi;
    d["fitted"] = r.fitted;
    d["note"] = r.note;
    d["lower_ok"] = r.lower_ok;
    d["a_plus_min"] = r.a_plus_min;
    d["thm32_ok"] = r.thm32_ok;
    d["a_minus"] = r.a_minus_fit;
    d["t_bar"] = r.t_bar;
    d["duhamel_ok"] = r.duhamel_ok;
    return d;
}

std::vector<double> times_of(const VelocityHistory& h) {
    std::vector<double> t(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) t[i] = h.time(i);
    return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Relaxation of a body with a cavity in a free molecular gas";
    m.attr("__version__") = CAVITYDRAG_VERSION;

    py::register_exception<Error>(m, "CavityDragError", PyExc_ValueError);

    m.def("drag_f0", [](double v, int dim, double rho, double beta, double radius) {
        GasParams g{rho, beta, dim};
        BodyGeometry b;
        b.radius = radius;
        return drag_f0(DragLaw::make(g, b), v);
    }, py::arg("v"), py::arg("dim") = 3, py::arg("rho") = 1.0, py::arg("beta") = 1.0, py::arg("radius") = 1.0);

    m.def("drag_f0_prime", [](double v, int dim, double rho, double beta, double radius) {
        GasParams g{rho, beta, dim};
        BodyGeometry b;
        b.radius = radius;
        return drag_f0_prime(DragLaw::make(g, b), v);
    }, py::arg("v"), py::arg("dim") = 3, py::arg("rho") = 1.0, py::arg("beta") = 1.0, py::arg("radius") = 1.0);

    m.def("preset_names", &preset_names);

    m.def("preset_config", [](const std::string& name) { return to_key_values(preset(name)); },
          "preset as key = value text");

    m.def("equilibrium", [](const std::string& preset_name, const std::map<std::string, std::string>& overrides) {
        SimConfig cfg = make_config(preset_name, overrides);
        resolve(cfg);
        return equilibrium_dict(equilibrium_of(DragLaw::make(cfg.gas, cfg.body)));
    }, py::arg("preset") = "", py::arg("overrides") = std::map<std::string, std::string>{});

    m.def("autonomous", [](const std::string& preset_name, const std::map<std::string, std::string>& overrides) {
        SimConfig cfg = make_config(preset_name, overrides);
        const double f0 = resolve(cfg);
        const DragLaw law = DragLaw::make(cfg.gas, cfg.body);
        const VelocityHistory a = autonomous_solve(law, cfg.map_cfg);
        py::dict d;
        d["t"] = times_of(a);
        d["deficit"] = a.deficits();
        d["equilibrium"] = equilibrium_dict(a.summary());
        d["trapping"] = trapping_dict(solve_s_star(a, cfg.body.barrier, cfg.map_cfg.alpha));
        d["f0_total"] = f0;
        return d;
    }, py::arg("preset") = "", py::arg("overrides") = std::map<std::string, std::string>{});

    m.def("fixed_point", [](const std::string& preset_name, const std::map<std::string, std::string>& overrides) {
        const SimConfig cfg = make_config(preset_name, overrides);
        FixedPointRun r;
        {
            py::gil_scoped_release release;
            r = run_fixed_point(cfg);
        }
        py::dict d;
        d["t"] = times_of(r.trace.final);
        d["deficit"] = r.trace.final.deficits();
        std::vector<double> tt, rp, rm;
        for (const auto& row : r.table) {
            tt.push_back(row.t);
            rp.push_back(row.r_plus);
            rm.push_back(row.r_minus);
        }
        d["table_t"] = tt;
        d["r_plus"] = rp;
        d["r_minus"] = rm;
        d["distances"] = r.trace.distances;
        d["converged"] = r.trace.converged;
        d["idempotence"] = r.idempotence;
        d["equilibrium"] = equilibrium_dict(r.eq);
        d["trapping"] = trapping_dict(r.trapping);
        d["fit"] = fit_dict(r.fit);
        return d;
    }, py::arg("preset") = "", py::arg("overrides") = std::map<std::string, std::string>{});

    m.def("friction_mc_autonomous", [](const std::string& preset_name, const std::map<std::string, std::string>& overrides,
                                       double t, std::size_t n_samples, std::uint64_t seed, bool truncate) {
        SimConfig cfg = make_config(preset_name, overrides);
        resolve(cfg);
        const DragLaw law = DragLaw::make(cfg.gas, cfg.body);
        const VelocityHistory a = autonomous_solve(law, cfg.map_cfg);
        OracleOptions opt;
        opt.n_samples = n_samples;
        opt.seed = seed;
        opt.truncate = truncate;
        opt.workers = cfg.map_cfg.workers;
        const OracleEstimate e = friction_mc(a, law, t, opt);
        py::dict d;
        d["estimate"] = e.estimate;
        d["stderr"] = e.stderr_total;
        d["f0_part"] = e.f0_part;
        d["recollision"] = e.recollision();
        d["f0_exact"] = drag_f0(law, a.value_at(t));
        return d;
    }, py::arg("preset"), py::arg("overrides"), py::arg("t"), py::arg("n_samples") = 100000, py::arg("seed") = 1,
       py::arg("truncate") = false);

    m.def("simulate", [](const std::string& preset_name, const std::map<std::string, std::string>& overrides) {
        const SimConfig cfg = make_config(preset_name, overrides);
        RunResult res;
        {
            py::gil_scoped_release release;
            res = run(cfg);
        }
        py::dict d;
        d["exit_code"] = res.exit_code;
        d["violations"] = res.violations;
        d["files"] = res.files;
        d["summary"] = res.summary;
        return d;
    }, py::arg("preset") = "", py::arg("overrides") = std::map<std::string, std::string>{});
}
