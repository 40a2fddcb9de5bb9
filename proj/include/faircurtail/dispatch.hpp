#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "faircurtail/fairness.hpp"
#include "faircurtail/linprog.hpp"
#include "faircurtail/network.hpp"
#include "faircurtail/pv_device.hpp"
#include "faircurtail/sensitivity.hpp"

namespace faircurtail {

enum class Objective { Bill, Curtailment };

struct DispatchConfig {
    Objective objective = Objective::Curtailment;
    bool feedback = false;    // fairness-informed weights alpha
    bool past_aware = false;  // h mixes cumulative history into the ratio
    double w = 0.0;           // weight of the fairness deviation term
    double v_min = 0.95;
    double v_max = 1.05;
    double c_im = 0.3;    // import tariff, currency/kWh
    double c_fit = 0.1;   // feed-in tariff, currency/kWh
    double alpha_cap = 100.0;
    int k_segments = 8;
    double energy_per_pu = 0.0;  // kWh represented by 1 p.u. power over one step

    void validate() const;  // throws ValidationError
};

struct TimestepInputs {
    const SensitivityMatrices* sens = nullptr;
    Eigen::VectorXd load_p;  // per-bus forecast demand (positive), p.u.
    Eigen::VectorXd load_q;
    std::vector<double> mpp_forecast;  // per-plant forecast MPP, p.u.
    std::vector<double> alpha;         // per-plant weight (> 0)
    std::vector<LedgerRecord> history; // per-plant cumulative sums through t-1
};

struct DispatchResult {
    std::vector<PvSetpoint> setpoints;
    double gamma = 0.0;  // fairness level (0 when no fairness term is active)
    LpStatus lp_status = LpStatus::Optimal;
    Eigen::VectorXd predicted_v;
    double objective_value = 0.0;  // sum alpha*f + w*|gamma - h| at the solution
    int lp_iterations = 0;
    int repairs = 0;            // epigraph repair re-solves
    bool epigraph_tight = true; // b equals the recomputed bill everywhere
};

// Electricity cost of one plant's site over a step: import billed at c_im,
// export remunerated at c_fit.  Arguments are energies (kWh); negative
// result means net earnings.
double bill_value(double e_pv, double e_load, double c_im, double c_fit);

// Fairness ratio h as an affine expression c0 + c1 * var, where var is the
// bill epigraph variable (bill objective) or the plant's active power
// (curtailment objective).  nullopt when the ratio is undefined this step
// and the plant must be left out of the fairness rows.
struct AffineExpr {
    double c0 = 0.0;
    double c1 = 0.0;
};
std::optional<AffineExpr> h_bill(const Network& net, const DispatchConfig& cfg,
                                 const TimestepInputs& ins, int plant);
std::optional<AffineExpr> h_curt(const DispatchConfig& cfg, const TimestepInputs& ins,
                                 int plant);

// Per-plant weights: all 1 without feedback; otherwise the clamped inverse
// of the plant's cumulative earnings/generation ratio.
std::vector<double> compute_alpha(const SimulationLedger& ledger,
                                  const DispatchConfig& cfg);

// Assembles the per-timestep LP: plant envelope (MPP bound, power-factor
// cone, capability cuts), linearized voltage band at every bus, bill
// epigraph rows (bill objective), and the fairness deviation rows around
// the level variable gamma when w > 0.
LpProblem build_lp(const Network& net, const DispatchConfig& cfg,
                   const TimestepInputs& ins);

// Solves the timestep problem and maps the solution back to setpoints,
// including the bill-epigraph tightness check and repair re-solve.
DispatchResult dispatch_step(const Network& net, const DispatchConfig& cfg,
                             const TimestepInputs& ins);

}  // namespace faircurtail
