#include "cavitydrag/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cavitydrag/trapping.hpp"

namespace cavitydrag {

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::autonomous: return "autonomous";
        case Scenario::fixed_point: return "fixed-point";
        case Scenario::oracle_compare: return "oracle-compare";
        case Scenario::exponent_suite: return "exponent-suite";
    }
    return "?";
}

Scenario scenario_from_string(const std::string& s) {
    if (s == "autonomous") return Scenario::autonomous;
    if (s == "fixed-point") return Scenario::fixed_point;
    if (s == "oracle-compare") return Scenario::oracle_compare;
    if (s == "exponent-suite") return Scenario::exponent_suite;
    throw Error("unknown scenario '" + s + "'");
}

void SimConfig::validate() const {
    gas.validate();
    body.validate();
    map_cfg.validate();
    if (output_dir.empty()) throw Error("output_dir must not be empty");
    if (!(surface_tol > 0.0)) throw Error("surface_tol must be positive");
    if (oracle_samples < 1000) throw Error("oracle_samples must be >= 1000");
    if (scenario == Scenario::oracle_compare)
        for (double t : oracle_times)
            if (!(t > 0.0) || t > map_cfg.horizon) throw Error("oracle times must lie in (0, horizon]");
    if (fit_t_lo < 0.0 || fit_t_hi < 0.0) throw Error("fit window must be non-negative");
    if (fit_t_hi > 0.0 && fit_t_lo >= fit_t_hi) throw Error("fit_t_lo must be below fit_t_hi");
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty()) throw Error("key '" + key + "': not a number: '" + v + "'");
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x)) throw Error("key '" + key + "': expected an integer");
    return static_cast<long long>(x);
}

std::size_t to_count(const std::string& key, const std::string& v) {
    const long long x = to_int(key, v);
    if (x < 0) throw Error("key '" + key + "': expected a non-negative integer");
    return static_cast<std::size_t>(x);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    return out;
}

void apply_one(SimConfig& c, const std::string& k, const std::string& v) {
    MapConfig& m = c.map_cfg;
    if (k == "scenario") c.scenario = scenario_from_string(v);
    else if (k == "output_dir") c.output_dir = v;
    else if (k == "seed") c.seed = static_cast<std::uint64_t>(to_count(k, v));
    else if (k == "workers") m.workers = to_count(k, v);
    else if (k == "rho") c.gas.rho = to_double(k, v);
    else if (k == "beta") c.gas.beta = to_double(k, v);
    else if (k == "dim") c.gas.dim = static_cast<int>(to_int(k, v));
    else if (k == "radius") c.body.radius = to_double(k, v);
    else if (k == "barrier") {
        c.body.barrier = to_double(k, v);
        c.barrier_fraction = -1.0;
    } else if (k == "barrier_fraction") c.barrier_fraction = to_double(k, v);
    else if (k == "force") c.body.force = to_double(k, v);
    else if (k == "v0") {
        c.body.v0 = to_double(k, v);
        c.gamma = 0.0;
    } else if (k == "gamma") c.gamma = to_double(k, v);
    else if (k == "surface_tol") c.surface_tol = to_double(k, v);
    else if (k == "horizon") m.horizon = to_double(k, v);
    else if (k == "dt") m.dt = to_double(k, v);
    else if (k == "fp_tol") m.fp_tol = to_double(k, v);
    else if (k == "fp_rel_tol") m.fp_rel_tol = to_double(k, v);
    else if (k == "fp_max_iter") m.fp_max_iter = static_cast<int>(to_int(k, v));
    else if (k == "acceptance") m.acceptance = acceptance_from_string(v);
    else if (k == "stride") m.stride = to_count(k, v);
    else if (k == "mixing") m.mixing = to_double(k, v);
    else if (k == "alpha") m.alpha = to_double(k, v);
    else if (k == "quad_nodes") m.quad.nodes = to_count(k, v);
    else if (k == "quad_max_nodes") m.quad.max_nodes = to_count(k, v);
    else if (k == "quad_rel_tol") m.quad.rel_tol = to_double(k, v);
    else if (k == "depth_cap") m.quad.depth_cap = static_cast<int>(to_int(k, v));
    else if (k == "probes") m.quad.probes = to_count(k, v);
    else if (k == "oracle_samples") c.oracle_samples = to_count(k, v);
    else if (k == "oracle_times") c.oracle_times = to_list(k, v);
    else if (k == "fit_t_lo") c.fit_t_lo = to_double(k, v);
    else if (k == "fit_t_hi") c.fit_t_hi = to_double(k, v);
    else throw Error("unknown key '" + k + "'");
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::stringstream ss(text);
    std::string line;
    int n = 0;
    while (std::getline(ss, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("line " + std::to_string(n) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
        if (key.empty()) throw Error("line " + std::to_string(n) + ": empty key");
        kv[key] = val;
    }
    return kv;
}

KeyValues read_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str());
}

void apply_keys(SimConfig& cfg, const KeyValues& kv) {
    const auto p = kv.find("preset");
    if (p != kv.end()) {
        const std::string keep_out = cfg.output_dir;
        cfg = preset(p->second);
        cfg.output_dir = keep_out;
    }
    for (const auto& [k, v] : kv)
        if (k != "preset") apply_one(cfg, k, v);
}

std::vector<std::string> preset_names() {
    return {"disk3d", "disk2d", "cylinder-trapped", "box-trapped", "cylinder-deep", "no-trap"};
}

SimConfig preset(const std::string& name) {
    SimConfig c;
    c.preset = name;
    c.gas = GasParams{1.0, 1.0, 3};
    c.body.radius = 1.0;
    c.body.force = 0.5;
    c.gamma = 0.01;
    c.map_cfg.horizon = 200.0;
    c.map_cfg.dt = 1e-2;
    if (name == "disk3d") {
        c.barrier_fraction = 0.0;
    } else if (name == "disk2d") {
        c.gas.dim = 2;
        c.barrier_fraction = 0.0;
    } else if (name == "cylinder-trapped") {
        c.barrier_fraction = 0.5;
    } else if (name == "box-trapped") {
        c.gas.dim = 2;
        c.barrier_fraction = 0.8;
    } else if (name == "cylinder-deep") {
        // trapped region dominant; used for the oracle comparison
        c.barrier_fraction = 0.9;
        c.map_cfg.horizon = 40.0;
        c.scenario = Scenario::oracle_compare;
        // the oracle follows chains to any depth; cap 8 shifts r+ by ~1e-5 relative
        c.map_cfg.quad.depth_cap = 64;
    } else if (name == "no-trap") {
        // walls taller than f(0): nothing ever escapes, s* does not exist
        c.barrier_fraction = 1.5;
    } else {
        throw Error("unknown preset '" + name + "'");
    }
    return c;
}

double resolve(SimConfig& cfg) {
    cfg.gas.validate();
    BodyGeometry probe = cfg.body;
    probe.v0 = 0.0;
    const DragLaw law0 = DragLaw::make(cfg.gas, probe);
    const double vinf = solve_limit_velocity(law0, cfg.body.force);
    if (cfg.gamma > 0.0) {
        if (cfg.gamma >= vinf) throw Error("gamma must be below V_inf");
        cfg.body.v0 = vinf - cfg.gamma;
    }
    const DragLaw law = DragLaw::make(cfg.gas, cfg.body);
    const VelocityHistory a = autonomous_solve(law, cfg.map_cfg);
    const double f0 = aux_f(a, 0.0);
    if (cfg.barrier_fraction >= 0.0) cfg.body.barrier = cfg.barrier_fraction * f0;
    cfg.validate();
    return f0;
}

std::string to_key_values(const SimConfig& c) {
    const MapConfig& m = c.map_cfg;
    std::string out;
    char buf[256];
    auto put = [&](const char* k, double v) {
        std::snprintf(buf, sizeof buf, "%s = %.17g\n", k, v);
        out += buf;
    };
    auto put_str = [&](const char* k, const std::string& v) { out += std::string(k) + " = \"" + v + "\"\n"; };
    put_str("scenario", to_string(c.scenario));
    put_str("output_dir", c.output_dir);
    put("seed", static_cast<double>(c.seed));
    put("workers", static_cast<double>(m.workers));
    put("rho", c.gas.rho);
    put("beta", c.gas.beta);
    put("dim", c.gas.dim);
    put("radius", c.body.radius);
    put("force", c.body.force);
    if (c.gamma > 0.0)
        put("gamma", c.gamma);
    else
        put("v0", c.body.v0);
    if (c.barrier_fraction >= 0.0)
        put("barrier_fraction", c.barrier_fraction);
    else
        put("barrier", c.body.barrier);
    put("surface_tol", c.surface_tol);
    put("horizon", m.horizon);
    put("dt", m.dt);
    put("fp_tol", m.fp_tol);
    put("fp_rel_tol", m.fp_rel_tol);
    put("fp_max_iter", m.fp_max_iter);
    put_str("acceptance", to_string(m.acceptance));
    put("stride", static_cast<double>(m.stride));
    put("mixing", m.mixing);
    put("alpha", m.alpha);
    put("quad_nodes", static_cast<double>(m.quad.nodes));
    put("quad_max_nodes", static_cast<double>(m.quad.max_nodes));
    put("quad_rel_tol", m.quad.rel_tol);
    put("depth_cap", m.quad.depth_cap);
    put("probes", static_cast<double>(m.quad.probes));
    put("oracle_samples", static_cast<double>(c.oracle_samples));
    std::string times;
    for (std::size_t i = 0; i < c.oracle_times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", c.oracle_times[i]);
        times += buf;
    }
    put_str("oracle_times", times);
    put("fit_t_lo", c.fit_t_lo);
    put("fit_t_hi", c.fit_t_hi);
    return out;
}

}  // namespace cavitydrag
