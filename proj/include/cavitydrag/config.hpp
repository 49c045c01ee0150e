#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cavitydrag/dynamics.hpp"

namespace cavitydrag {

enum class Scenario { autonomous, fixed_point, oracle_compare, exponent_suite };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct SimConfig {
    std::string preset;  // name the config started from, empty if none
    GasParams gas;
    BodyGeometry body;
    MapConfig map_cfg;
    Scenario scenario = Scenario::fixed_point;
    std::string output_dir = "out";
    std::uint64_t seed = 1;

    // gamma > 0 sets v0 = V_inf - gamma; barrier_fraction >= 0 sets
    // h = fraction * f(0) on the autonomous history. Both resolved by resolve().
    double gamma = 0.01;
    double barrier_fraction = -1.0;
    double surface_tol = 1e-9;  // relative tolerance for |x_perp| = R

    std::size_t oracle_samples = 100000;
    std::vector<double> oracle_times{3.0, 10.0};
    double fit_t_lo = 0.0;  // 0 = automatic window
    double fit_t_hi = 0.0;

    void validate() const;
};

// key -> value as written in the file (strings unquoted)
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::string& path);

// Applies keys in order: "preset" first if present, then the rest.
void apply_keys(SimConfig& cfg, const KeyValues& kv);

// Built-in named configurations.
std::vector<std::string> preset_names();
SimConfig preset(const std::string& name);

// Fills v0 and barrier from gamma / barrier_fraction. Returns f(0) of the
// autonomous history used for the barrier.
double resolve(SimConfig& cfg);

// Flat key = value dump; reading it back gives the same config.
std::string to_key_values(const SimConfig& cfg);

}  // namespace cavitydrag
