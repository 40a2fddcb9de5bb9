#include "faircurtail/simulation.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "faircurtail/errors.hpp"
#include "faircurtail/power_flow.hpp"
#include "faircurtail/sensitivity.hpp"

namespace faircurtail {

namespace {

double ratio_of(const LedgerRecord& cum, Objective objective) {
    if (objective == Objective::Bill) {
        const double potential_earn = -cum.potential_bill;
        if (std::abs(potential_earn) < 1e-12) return 1.0;
        return -cum.realized_bill / potential_earn;
    }
    if (cum.potential_kwh <= 0.0) return 1.0;
    return cum.realized_kwh / cum.potential_kwh;
}

std::set<int> metric_days(int days) {
    std::set<int> out;
    for (int d : {1, 3, 7})
        if (d <= days) out.insert(d);
    out.insert(days);
    return out;
}

void dump_sensitivity_csv(const SensitivityMatrices& sens, const Network& net,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    char buf[64];
    out << "matrix,row_bus,col_bus,value\n";
    for (const char* which : {"kp", "kq"}) {
        const Eigen::MatrixXd& k = which[1] == 'p' ? sens.kp : sens.kq;
        for (int i = 0; i < k.rows(); ++i)
            for (int j = 0; j < k.cols(); ++j) {
                if (k(i, j) == 0.0) continue;
                std::snprintf(buf, sizeof buf, ",%d,%d,%.17g\n", net.buses[i].ext_id,
                              net.buses[j].ext_id, k(i, j));
                out << which << buf;
            }
    }
}

}  // namespace

void apply_variant(DispatchConfig& cfg, const std::string& variant) {
    if (variant == "unfair") {
        cfg.feedback = false;
        cfg.past_aware = false;
        cfg.w = 0.0;
    } else if (variant == "F0P0") {
        cfg.feedback = false;
        cfg.past_aware = false;
    } else if (variant == "F0P1") {
        cfg.feedback = false;
        cfg.past_aware = true;
    } else if (variant == "F1P0") {
        cfg.feedback = true;
        cfg.past_aware = false;
    } else if (variant == "F1P1") {
        cfg.feedback = true;
        cfg.past_aware = true;
    } else {
        throw ConfigError("unknown variant '" + variant +
                          "' (expected unfair|F0P0|F0P1|F1P0|F1P1)");
    }
}

RunReport run_simulation(const Network& net, const RunConfig& cfg,
                         const Profiles& profiles) {
    profiles.validate();
    if (cfg.days < 1) throw ConfigError("days must be at least 1");
    if (cfg.days > profiles.days)
        throw ConfigError("profiles cover " + std::to_string(profiles.days) +
                          " day(s), requested " + std::to_string(cfg.days));

    DispatchConfig dcfg = cfg.dispatch;
    apply_variant(dcfg, cfg.variant);
    dcfg.energy_per_pu = net.base_mva * 1000.0 * (profiles.dt_minutes / 60.0);
    dcfg.validate();

    const int n = net.size();
    const int np = static_cast<int>(net.pv_plants.size());
    const int spd = profiles.steps_per_day();
    const int total = cfg.days * spd;
    const double u = dcfg.energy_per_pu;

    std::vector<CapabilityCuts> cuts;
    cuts.reserve(np);
    for (const PvPlant& pl : net.pv_plants)
        cuts.push_back(capability_cuts(pl.s_rated, dcfg.k_segments));

    const bool dumping = !cfg.dump_dir.empty() && (cfg.dump_lp || cfg.dump_sensitivities);
    if (dumping) std::filesystem::create_directories(cfg.dump_dir);

    RunReport rep;
    rep.variant = cfg.variant;
    rep.objective = dcfg.objective;
    rep.w = dcfg.w;
    rep.days = cfg.days;
    rep.dt_minutes = profiles.dt_minutes;
    rep.v_min = dcfg.v_min;
    rep.v_max = dcfg.v_max;
    rep.ledger = SimulationLedger(np);
    rep.steps.reserve(total);

    const std::set<int> boundaries = metric_days(cfg.days);
    std::vector<LedgerRecord> running(np);  // incremental cumulative sums

    // state carried between steps (cold start: no injections, no forecasts)
    InjectionVector prev_inj;
    prev_inj.p = Eigen::VectorXd::Zero(n);
    prev_inj.q = Eigen::VectorXd::Zero(n);
    std::vector<double> prev_mpp(np, 0.0);
    Eigen::VectorXd prev_load_p = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd prev_load_q = Eigen::VectorXd::Zero(n);

    int within_slack = 0;

    for (int t = 0; t < total; ++t) {
        try {
            StepRecord rec;
            rec.step = t;

            // actual conditions at t
            std::vector<double> mpp_act(np);
            for (int l = 0; l < np; ++l)
                mpp_act[l] = net.pv_plants[l].p_capacity * profiles.pv_norm[t];
            Eigen::VectorXd load_p_act = Eigen::VectorXd::Zero(n);
            Eigen::VectorXd load_q_act = Eigen::VectorXd::Zero(n);
            for (const LoadPoint& ld : net.loads) {
                load_p_act(ld.bus) += ld.p_nom * profiles.load_norm[t];
                load_q_act(ld.bus) += ld.q_nom * profiles.load_norm[t];
            }

            if (np > 0) {
                // (1)-(2) operating point and sensitivities from t-1 realizations
                const PfSolution base = solve_pf(net, prev_inj, {cfg.v0});
                const SensitivityMatrices sens = voltage_sensitivities(net, base);

                // (3) persistent forecasts
                TimestepInputs ins;
                ins.sens = &sens;
                ins.load_p = prev_load_p;
                ins.load_q = prev_load_q;
                ins.mpp_forecast = prev_mpp;
                ins.alpha = compute_alpha(rep.ledger, dcfg);
                ins.history.resize(np);
                for (int l = 0; l < np; ++l) ins.history[l] = rep.ledger.cumulative(l);

                if (dumping && cfg.dump_sensitivities)
                    dump_sensitivity_csv(sens, net,
                                         cfg.dump_dir + "/sensitivities_step" +
                                             std::to_string(t) + ".csv");
                if (dumping && cfg.dump_lp) {
                    std::ofstream out(cfg.dump_dir + "/lp_step" + std::to_string(t) +
                                      ".txt");
                    out << dump_lp(build_lp(net, dcfg, ins));
                }

                // (4) dispatch
                const DispatchResult dres = dispatch_step(net, dcfg, ins);
                rec.setpoints = dres.setpoints;
                rec.v_pred = dres.predicted_v;
                rec.gamma = dres.gamma;
                rec.repairs = dres.repairs;
                rep.total_repairs += dres.repairs;
                rep.all_epigraph_tight = rep.all_epigraph_tight && dres.epigraph_tight;

                // (5) realization against actual MPP
                rec.p_real.resize(np);
                rec.q_real.resize(np);
                for (int l = 0; l < np; ++l) {
                    const PvSetpoint real = realize_setpoint(
                        rec.setpoints[l], mpp_act[l], net.pv_plants[l].xi, cuts[l]);
                    rec.p_real[l] = real.p;
                    rec.q_real[l] = real.q;
                }
            } else {
                rec.v_pred = Eigen::VectorXd::Constant(n, cfg.v0);
            }
            rec.mpp_actual = mpp_act;

            // (6) AC verification on realized injections
            InjectionVector real_inj;
            real_inj.p = -load_p_act;
            real_inj.q = -load_q_act;
            for (int l = 0; l < np; ++l) {
                real_inj.p(net.pv_plants[l].bus) += rec.p_real[l];
                real_inj.q(net.pv_plants[l].bus) += rec.q_real[l];
            }
            const PfSolution ac = solve_pf(net, real_inj, {cfg.v0});
            rec.v_ac = ac.v_mag;
            rec.max_v_ac = ac.v_mag.maxCoeff();
            rec.violations =
                static_cast<int>(check_voltage_limits(ac, dcfg.v_min, dcfg.v_max).size());
            if (rec.max_v_ac <= dcfg.v_max + 0.002 + 1e-12) ++within_slack;

            // (7) ledger update with realized energies and bills
            std::vector<LedgerRecord> row(np);
            rec.bill.resize(np);
            for (int l = 0; l < np; ++l) {
                const double e_load = load_p_act(net.pv_plants[l].bus) * u;
                LedgerRecord& r = row[l];
                r.realized_kwh = rec.p_real[l] * u;
                r.potential_kwh = mpp_act[l] * u;
                r.realized_bill = bill_value(r.realized_kwh, e_load, dcfg.c_im, dcfg.c_fit);
                r.potential_bill =
                    bill_value(r.potential_kwh, e_load, dcfg.c_im, dcfg.c_fit);
                rec.bill[l] = r.realized_bill;
                running[l] += r;
            }
            rep.ledger.append(row);
            rep.steps.push_back(std::move(rec));

            // carry state into t+1
            prev_inj = real_inj;
            prev_mpp = mpp_act;
            prev_load_p = load_p_act;
            prev_load_q = load_q_act;

            // day-boundary metrics from the incremental sums
            if ((t + 1) % spd == 0) {
                const int day = (t + 1) / spd;
                if (boundaries.count(day)) {
                    DayMetrics dm;
                    dm.day = day;
                    if (np > 0) {
                        std::vector<double> values(np);
                        for (int l = 0; l < np; ++l)
                            values[l] = ratio_of(running[l], dcfg.objective);
                        dm.jfi = jfi(values);
                        dm.gini = gini(values);
                        LedgerRecord tot;
                        for (const LedgerRecord& r : running) tot += r;
                        dm.curtail_pct =
                            tot.potential_kwh > 0.0
                                ? 100.0 * (1.0 - tot.realized_kwh / tot.potential_kwh)
                                : 0.0;
                    }
                    rep.day_metrics.push_back(dm);
                }
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("simulation aborted at step " + std::to_string(t) +
                                     " (" + cfg.variant + "): " + e.what());
        }
    }

    rep.ac_within_slack_fraction = total > 0 ? static_cast<double>(within_slack) / total
                                             : 1.0;
    rep.final_earnings_ratio = earnings_ratios(rep.ledger);
    rep.final_generation_ratio = generation_ratios(rep.ledger);
    return rep;
}

void write_outputs(const RunReport& report, const Network& net,
                   const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    char buf[256];
    const char* objective = report.objective == Objective::Bill ? "bill" : "curt";

    {
        std::ofstream out(out_dir + "/timeseries.csv");
        if (!out) throw ConfigError("cannot write " + out_dir + "/timeseries.csv");
        out << "step,plant,p_set,q_set,p_real,mpp,bill\n";
        for (const StepRecord& rec : report.steps)
            for (size_t l = 0; l < rec.setpoints.size(); ++l) {
                std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                              rec.step, net.pv_plants[l].id, rec.setpoints[l].p,
                              rec.setpoints[l].q, rec.p_real[l], rec.mpp_actual[l],
                              rec.bill[l]);
                out << buf;
            }
    }
    {
        std::ofstream out(out_dir + "/voltages.csv");
        if (!out) throw ConfigError("cannot write " + out_dir + "/voltages.csv");
        out << "step,bus,v_ac,v_pred\n";
        for (const StepRecord& rec : report.steps)
            for (int i = 0; i < rec.v_ac.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", rec.step,
                              net.buses[i].ext_id, rec.v_ac(i), rec.v_pred(i));
                out << buf;
            }
    }
    {
        std::ofstream out(out_dir + "/metrics.csv");
        if (!out) throw ConfigError("cannot write " + out_dir + "/metrics.csv");
        out << "day,variant,w,curtail_pct,jfi,gini\n";
        for (const DayMetrics& dm : report.day_metrics) {
            std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%.17g,%.17g\n", dm.day,
                          report.variant.c_str(), report.w, dm.curtail_pct, dm.jfi,
                          dm.gini);
            out << buf;
        }
    }
    {
        nlohmann::json j;
        j["config"] = {{"variant", report.variant},
                       {"objective", objective},
                       {"w", report.w},
                       {"days", report.days},
                       {"dt_minutes", report.dt_minutes},
                       {"v_min", report.v_min},
                       {"v_max", report.v_max},
                       {"plants", net.pv_plants.size()},
                       {"buses", net.buses.size()}};
        nlohmann::json days = nlohmann::json::array();
        for (const DayMetrics& dm : report.day_metrics)
            days.push_back({{"day", dm.day},
                            {"curtail_pct", dm.curtail_pct},
                            {"jfi", dm.jfi},
                            {"gini", dm.gini}});
        int violations = 0;
        for (const StepRecord& rec : report.steps) violations += rec.violations;
        j["summary"] = {{"day_metrics", days},
                        {"final_earnings_ratio", report.final_earnings_ratio},
                        {"final_generation_ratio", report.final_generation_ratio},
                        {"ac_within_slack_fraction", report.ac_within_slack_fraction},
                        {"ac_violation_bus_steps", violations},
                        {"epigraph_repairs", report.total_repairs},
                        {"epigraph_tight", report.all_epigraph_tight}};
        std::ofstream out(out_dir + "/report.json");
        if (!out) throw ConfigError("cannot write " + out_dir + "/report.json");
        out << j.dump(2) << "\n";
    }
}

}  // namespace faircurtail
