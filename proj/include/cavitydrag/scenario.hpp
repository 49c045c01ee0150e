#pragma once

#include <string>
#include <vector>

#include "cavitydrag/analysis.hpp"
#include "cavitydrag/config.hpp"
#include "cavitydrag/oracle.hpp"
#include "cavitydrag/trapping.hpp"

namespace cavitydrag {

// Everything a fixed-point run produces, before any file is written.
struct FixedPointRun {
    SimConfig cfg;
    double f0_total = 0.0;
    EquilibriumSummary eq;
    TrappingSummary trapping;
    FixedPointTrace trace;
    std::vector<RecollisionBreakdown> table;  // evaluated on the final iterate
    double idempotence = 0.0;                 // sup-norm change under one more map application
    FitReport fit;
};

// Resolves the config and runs fixed point, one extra map application and the analysis.
FixedPointRun run_fixed_point(SimConfig cfg);

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> violations;
    std::vector<std::string> files;
    std::string summary;  // human readable table
};

// Executes cfg.scenario and writes its artifacts under cfg.output_dir.
RunResult run(SimConfig cfg);

// CSV with columns t, V, V_inf_minus_V, F0, r_plus, r_minus.
std::string trajectory_csv(const VelocityHistory& h, const DragLaw& law,
                           const std::vector<RecollisionBreakdown>& table);

std::string gnuplot_script(const std::string& csv_name, const FitReport& fit);

}  // namespace cavitydrag
