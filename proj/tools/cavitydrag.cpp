#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cavitydrag/config.hpp"
#include "cavitydrag/scenario.hpp"

using namespace cavitydrag;

namespace {

// defaults < preset < config file < --set < dedicated flags
struct SimulateArgs {
    std::string config;
    std::string preset;
    std::vector<std::string> sets;
    std::string scenario;
    std::string out;
    long long seed = -1;
    long long workers = -1;
    bool quiet = false;
};

std::string default_out() {
    const char* env = std::getenv("CAVITYDRAG_OUT");
    return env && *env ? env : "out";
}

SimConfig build_config(const SimulateArgs& a) {
    SimConfig cfg;
    cfg.output_dir = default_out();
    KeyValues kv;
    if (!a.preset.empty()) kv["preset"] = a.preset;
    if (!a.config.empty())
        for (const auto& [k, v] : read_key_values(a.config)) kv[k] = v;
    for (const auto& s : a.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw Error("--set expects key=value, got '" + s + "'");
        kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (!a.scenario.empty()) kv["scenario"] = a.scenario;
    if (!a.out.empty()) kv["output_dir"] = a.out;
    if (a.seed >= 0) kv["seed"] = std::to_string(a.seed);
    if (a.workers >= 0) kv["workers"] = std::to_string(a.workers);
    apply_keys(cfg, kv);
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relaxation of a body with a cavity in a free molecular gas"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run a scenario and write its artifacts");
    simulate->add_option("--config", sim.config, "key = value config file")->check(CLI::ExistingFile);
    simulate->add_option("--preset", sim.preset, "start from a named preset");
    simulate->add_option("--set", sim.sets, "override a single key, key=value (repeatable)");
    simulate->add_option("--scenario", sim.scenario, "autonomous, fixed-point, oracle-compare or exponent-suite");
    simulate->add_option("--out", sim.out, "output directory (default $CAVITYDRAG_OUT or ./out)");
    simulate->add_option("--seed", sim.seed, "random seed of the oracle");
    simulate->add_option("--workers", sim.workers, "worker threads, 0 = all cores");
    simulate->add_flag("--quiet", sim.quiet, "no summary on stdout");

    bool list = false;
    std::string show;
    auto* presets = app.add_subcommand("presets", "list or print the built-in presets");
    presets->add_flag("--list", list, "print preset names");
    presets->add_option("--show", show, "print one preset as a config file");

    std::string vconfig;
    auto* validate = app.add_subcommand("validate", "parse and resolve a config without running it");
    validate->add_option("--config", vconfig, "key = value config file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            const SimConfig cfg = build_config(sim);
            const RunResult res = run(cfg);
            if (!sim.quiet) std::cout << res.summary;
            for (const auto& v : res.violations) std::cerr << "invariant violated: " << v << "\n";
            if (!sim.quiet) std::cout << "wrote " << res.files.size() << " files to " << cfg.output_dir << "\n";
            return res.exit_code;
        }
        if (*presets) {
            if (!show.empty()) {
                std::cout << "preset = \"" << show << "\"\n" << to_key_values(preset(show));
                return 0;
            }
            for (const auto& n : preset_names()) std::cout << n << "\n";
            return 0;
        }
        if (*validate) {
            SimConfig cfg;
            cfg.output_dir = default_out();
            apply_keys(cfg, read_key_values(vconfig));
            const double f0 = resolve(cfg);
            std::printf("ok: scenario %s, v0 %.17g, barrier %.17g (f(0) = %.17g)\n", to_string(cfg.scenario).c_str(),
                        cfg.body.v0, cfg.body.barrier, f0);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
