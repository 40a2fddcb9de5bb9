#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "faircurtail/dispatch.hpp"
#include "faircurtail/network.hpp"
#include "faircurtail/profiles.hpp"

namespace faircurtail {

struct RunConfig {
    DispatchConfig dispatch;
    std::string variant = "unfair";  // unfair | F0P0 | F0P1 | F1P0 | F1P1
    int days = 1;
    double v0 = 1.0;  // slack voltage / flat-start magnitude
    std::string dump_dir;  // when set with a dump flag, debug files land here
    bool dump_lp = false;
    bool dump_sensitivities = false;
};

// Translates a variant label onto the feedback/past-aware flags; "unfair"
// also forces w = 0.  Throws ConfigError on an unknown label.
void apply_variant(DispatchConfig& cfg, const std::string& variant);

struct StepRecord {
    int step = 0;
    std::vector<PvSetpoint> setpoints;  // dispatched
    std::vector<double> p_real, q_real, mpp_actual, bill;  // realized per plant
    Eigen::VectorXd v_ac, v_pred;
    double max_v_ac = 0.0;
    double gamma = 0.0;
    int violations = 0;  // AC buses outside [v_min, v_max]
    int repairs = 0;
};

struct DayMetrics {
    int day = 0;
    double curtail_pct = 0.0;
    double jfi = 1.0;
    double gini = 0.0;
};

struct RunReport {
    // config echo
    std::string variant;
    Objective objective = Objective::Curtailment;
    double w = 0.0;
    int days = 0;
    int dt_minutes = 15;
    double v_min = 0.0, v_max = 0.0;

    std::vector<StepRecord> steps;
    SimulationLedger ledger{0};
    std::vector<DayMetrics> day_metrics;  // at days {1,3,7} and the final day
    std::vector<double> final_earnings_ratio, final_generation_ratio;
    double ac_within_slack_fraction = 1.0;  // steps with max |v| <= v_max + 0.002
    int total_repairs = 0;
    bool all_epigraph_tight = true;
};

// Closed-loop quasi-static run: each step solves the power flow at the
// previous step's realized injections, rebuilds sensitivities, forecasts
// by persistence, dispatches, realizes against the actual MPP, verifies
// with an AC solve, and appends to the ledger.
RunReport run_simulation(const Network& net, const RunConfig& cfg,
                         const Profiles& profiles);

// Writes timeseries.csv, voltages.csv, metrics.csv, and report.json.
void write_outputs(const RunReport& report, const Network& net,
                   const std::string& out_dir);

}  // namespace faircurtail
