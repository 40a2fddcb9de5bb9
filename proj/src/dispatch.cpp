#include "faircurtail/dispatch.hpp"

#include <algorithm>
#include <cmath>

#include "faircurtail/errors.hpp"

namespace faircurtail {

namespace {

constexpr double kDenomTol = 1e-12;
constexpr double kTightTol = 1e-6;
constexpr int kMaxRepairs = 5;

struct HTerm {
    double c0 = 0.0;
    double c1 = 0.0;
    int var = -1;  // LP variable the expression is affine in
};

struct LpLayout {
    std::vector<int> p_var, q_var, b_var;
    std::vector<int> t_var;  // -1 where the plant carries no fairness rows
    int gamma_var = -1;
    std::vector<std::optional<HTerm>> h;
};

void check_inputs(const Network& net, const DispatchConfig& cfg,
                  const TimestepInputs& ins) {
    cfg.validate();
    const int np = static_cast<int>(net.pv_plants.size());
    if (np == 0) throw ValidationError("dispatch needs at least one plant");
    if (!ins.sens) throw ValidationError("dispatch needs sensitivity matrices");
    if (ins.sens->v_base.size() != net.size())
        throw ValidationError("sensitivity matrices do not match network size");
    if (ins.load_p.size() != net.size() || ins.load_q.size() != net.size())
        throw ValidationError("load forecast vectors must be per-bus");
    if (static_cast<int>(ins.mpp_forecast.size()) != np ||
        static_cast<int>(ins.alpha.size()) != np ||
        static_cast<int>(ins.history.size()) != np)
        throw ValidationError("per-plant input vectors must match the plant count");
    for (int l = 0; l < np; ++l) {
        if (ins.alpha[l] <= 0.0) throw ValidationError("alpha must be positive");
        if (ins.mpp_forecast[l] < 0.0)
            throw ValidationError("mpp forecast must be non-negative");
    }
}

// h expressed against the LP variable index, or nullopt if excluded.
std::optional<HTerm> make_h(const Network& net, const DispatchConfig& cfg,
                            const TimestepInputs& ins, int l, int p_var, int b_var) {
    if (cfg.objective == Objective::Bill) {
        auto e = h_bill(net, cfg, ins, l);
        if (!e) return std::nullopt;
        return HTerm{e->c0, e->c1, b_var};
    }
    auto e = h_curt(cfg, ins, l);
    if (!e) return std::nullopt;
    return HTerm{e->c0, e->c1, p_var};
}

LpProblem build_dispatch_lp(const Network& net, const DispatchConfig& cfg,
                            const TimestepInputs& ins,
                            const std::vector<std::optional<HTerm>>* h_override,
                            LpLayout* layout_out) {
    check_inputs(net, cfg, ins);
    const int np = static_cast<int>(net.pv_plants.size());
    const int n = net.size();
    const double u = cfg.energy_per_pu;
    const bool bill = cfg.objective == Objective::Bill;

    LpProblem lp;
    LpLayout lay;
    lay.p_var.resize(np);
    lay.q_var.resize(np);
    lay.b_var.assign(np, -1);
    lay.t_var.assign(np, -1);
    lay.h.assign(np, std::nullopt);

    for (int l = 0; l < np; ++l) {
        const PvPlant& pl = net.pv_plants[l];
        const std::string id = std::to_string(pl.id);
        lay.p_var[l] = lp.add_variable("p" + id, 0.0, ins.mpp_forecast[l]);
        lay.q_var[l] = lp.add_variable("q" + id, -pl.s_rated, pl.s_rated);
        if (bill)
            lay.b_var[l] =
                lp.add_variable("b" + id, -LpProblem::kInf, LpProblem::kInf, ins.alpha[l]);
        else
            lp.set_cost(lay.p_var[l], -ins.alpha[l] * u);
    }

    // fairness machinery only exists when the deviation term carries weight
    if (cfg.w > 0.0) {
        for (int l = 0; l < np; ++l) {
            lay.h[l] = h_override ? (*h_override)[l]
                                  : make_h(net, cfg, ins, l, lay.p_var[l], lay.b_var[l]);
            if (lay.h[l])
                lay.t_var[l] = lp.add_variable("t" + std::to_string(net.pv_plants[l].id),
                                               0.0, LpProblem::kInf, cfg.w);
        }
        lay.gamma_var = lp.add_variable("gamma", -LpProblem::kInf, LpProblem::kInf);
    }

    // plant envelope: power-factor cone and capability cuts
    for (int l = 0; l < np; ++l) {
        const PvPlant& pl = net.pv_plants[l];
        const int pv = lay.p_var[l], qv = lay.q_var[l];
        lp.add_row({{qv, 1.0}, {pv, -pl.xi}}, Relation::LessEq, 0.0);
        lp.add_row({{qv, -1.0}, {pv, -pl.xi}}, Relation::LessEq, 0.0);
        const CapabilityCuts cuts = capability_cuts(pl.s_rated, cfg.k_segments);
        for (const auto& [m_k, n_k] : cuts.segments) {
            lp.add_row({{pv, m_k}, {qv, 1.0}}, Relation::LessEq, n_k);
            lp.add_row({{pv, m_k}, {qv, -1.0}}, Relation::LessEq, n_k);
        }
    }

    // linearized voltage band at every bus, around the zero-PV prediction
    const SensitivityMatrices& sens = *ins.sens;
    const Eigen::VectorXd pred0 = predict_voltages(sens, -ins.load_p, -ins.load_q);
    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<int, double>> up, lo;
        up.reserve(2 * np);
        lo.reserve(2 * np);
        for (int l = 0; l < np; ++l) {
            const int bus = net.pv_plants[l].bus;
            const double kp = sens.kp(i, bus), kq = sens.kq(i, bus);
            if (kp != 0.0) {
                up.emplace_back(lay.p_var[l], kp);
                lo.emplace_back(lay.p_var[l], -kp);
            }
            if (kq != 0.0) {
                up.emplace_back(lay.q_var[l], kq);
                lo.emplace_back(lay.q_var[l], -kq);
            }
        }
        lp.add_row(up, Relation::LessEq, cfg.v_max - pred0(i));
        lp.add_row(lo, Relation::LessEq, pred0(i) - cfg.v_min);
    }

    // bill epigraph: b bounds both tariff pieces of the site bill
    if (bill) {
        for (int l = 0; l < np; ++l) {
            const double e_load = ins.load_p(net.pv_plants[l].bus) * u;
            lp.add_row({{lay.p_var[l], -cfg.c_im * u}, {lay.b_var[l], -1.0}},
                       Relation::LessEq, -cfg.c_im * e_load);
            lp.add_row({{lay.p_var[l], -cfg.c_fit * u}, {lay.b_var[l], -1.0}},
                       Relation::LessEq, -cfg.c_fit * e_load);
        }
    }

    // fairness deviation rows: t >= gamma - h and t >= h - gamma
    if (cfg.w > 0.0) {
        for (int l = 0; l < np; ++l) {
            if (lay.t_var[l] < 0) continue;
            const HTerm& h = *lay.h[l];
            lp.add_row({{lay.gamma_var, 1.0}, {h.var, -h.c1}, {lay.t_var[l], -1.0}},
                       Relation::LessEq, h.c0);
            lp.add_row({{h.var, h.c1}, {lay.gamma_var, -1.0}, {lay.t_var[l], -1.0}},
                       Relation::LessEq, -h.c0);
        }
    }

    if (layout_out) *layout_out = std::move(lay);
    return lp;
}

}  // namespace

void DispatchConfig::validate() const {
    if (w < 0.0) throw ValidationError("fairness weight w must be non-negative");
    if (!(v_min < v_max)) throw ValidationError("voltage band needs v_min < v_max");
    if (c_im < c_fit)
        throw ValidationError("tariffs need c_im >= c_fit (bill convexity)");
    if (alpha_cap <= 0.0) throw ValidationError("alpha_cap must be positive");
    if (k_segments < 2) throw ValidationError("k_segments must be at least 2");
    if (energy_per_pu <= 0.0)
        throw ValidationError("energy_per_pu must be positive (set from base and timestep)");
}

double bill_value(double e_pv, double e_load, double c_im, double c_fit) {
    const double net = e_load - e_pv;
    return (c_im - c_fit) * std::max(-net, 0.0) + c_im * net;
}

std::optional<AffineExpr> h_bill(const Network& net, const DispatchConfig& cfg,
                                 const TimestepInputs& ins, int plant) {
    const double u = cfg.energy_per_pu;
    const double e_load = ins.load_p(net.pv_plants[plant].bus) * u;
    const double f_hat =
        bill_value(ins.mpp_forecast[plant] * u, e_load, cfg.c_im, cfg.c_fit);
    if (!cfg.past_aware) {
        if (std::abs(f_hat) < kDenomTol) return std::nullopt;
        return AffineExpr{0.0, 1.0 / f_hat};
    }
    const double denom = ins.history[plant].potential_bill + f_hat;
    if (std::abs(denom) < kDenomTol) return std::nullopt;
    return AffineExpr{ins.history[plant].realized_bill / denom, 1.0 / denom};
}

std::optional<AffineExpr> h_curt(const DispatchConfig& cfg, const TimestepInputs& ins,
                                 int plant) {
    const double p_hat = ins.mpp_forecast[plant];
    if (!cfg.past_aware) {
        if (p_hat <= 0.0) return std::nullopt;
        return AffineExpr{0.0, 1.0 / p_hat};
    }
    const double u = cfg.energy_per_pu;
    const double denom = ins.history[plant].potential_kwh + p_hat * u;
    if (denom < kDenomTol) return std::nullopt;
    return AffineExpr{ins.history[plant].realized_kwh / denom, u / denom};
}

std::vector<double> compute_alpha(const SimulationLedger& ledger,
                                  const DispatchConfig& cfg) {
    std::vector<double> alpha(ledger.plants(), 1.0);
    if (!cfg.feedback) return alpha;
    for (int l = 0; l < ledger.plants(); ++l) {
        double ratio = cfg.objective == Objective::Bill
                           ? earnings_ratio(ledger, l).value_or(1.0)
                           : generation_ratio(ledger, l);
        ratio = std::clamp(ratio, 0.01, 10.0);
        alpha[l] = std::clamp(1.0 / ratio, 1e-2, cfg.alpha_cap);
    }
    return alpha;
}

LpProblem build_lp(const Network& net, const DispatchConfig& cfg,
                   const TimestepInputs& ins) {
    return build_dispatch_lp(net, cfg, ins, nullptr, nullptr);
}

DispatchResult dispatch_step(const Network& net, const DispatchConfig& cfg,
                             const TimestepInputs& ins) {
    const int np = static_cast<int>(net.pv_plants.size());
    const double u = cfg.energy_per_pu;
    const bool bill = cfg.objective == Objective::Bill;

    LpLayout lay;
    LpProblem lp = build_dispatch_lp(net, cfg, ins, nullptr, &lay);
    LpSolution sol = solve_lp(lp);
    DispatchResult res;
    res.lp_iterations = sol.iterations;
    if (sol.status == LpStatus::Infeasible)
        throw ConfigError(
            "dispatch LP infeasible: the voltage band cannot be met even with zero PV "
            "output — check v_min/v_max against the network and load scenario");
    if (sol.status == LpStatus::Unbounded)
        throw ConvergenceError("dispatch LP unbounded (malformed problem)", 0.0);

    // Bill epigraph can be inflated by the fairness term; detect and re-solve
    // with that plant's fairness ratio linearized around the active tariff
    // piece so b is pinned to the bill again.
    if (bill) {
        std::vector<std::optional<HTerm>> h_now = lay.h;
        for (int attempt = 0; attempt < kMaxRepairs; ++attempt) {
            bool inflated = false;
            for (int l = 0; l < np && !inflated; ++l) {
                if (lay.t_var[l] < 0) continue;
                const double p_l = sol.x[lay.p_var[l]];
                const double e_load = ins.load_p(net.pv_plants[l].bus) * u;
                const double tight = bill_value(p_l * u, e_load, cfg.c_im, cfg.c_fit);
                if (sol.x[lay.b_var[l]] > tight + kTightTol) inflated = true;
            }
            if (!inflated) break;
            ++res.repairs;
            for (int l = 0; l < np; ++l) {
                if (!h_now[l] || h_now[l]->var < 0) continue;
                if (h_now[l]->var != lay.b_var[l]) continue;  // already repaired
                const double p_l = sol.x[lay.p_var[l]];
                const double e_load = ins.load_p(net.pv_plants[l].bus) * u;
                const double tight = bill_value(p_l * u, e_load, cfg.c_im, cfg.c_fit);
                if (sol.x[lay.b_var[l]] <= tight + kTightTol) continue;
                // active tariff piece at the current active power
                const double net_e = e_load - p_l * u;
                const double c_a = cfg.c_im * net_e >= cfg.c_fit * net_e ? cfg.c_im
                                                                         : cfg.c_fit;
                const HTerm& h = *h_now[l];
                h_now[l] = HTerm{h.c0 + h.c1 * c_a * e_load, -h.c1 * c_a * u,
                                 lay.p_var[l]};
            }
            lp = build_dispatch_lp(net, cfg, ins, &h_now, &lay);
            sol = solve_lp(lp);
            res.lp_iterations += sol.iterations;
            if (sol.status != LpStatus::Optimal)
                throw ConvergenceError("epigraph repair re-solve failed", 0.0);
        }
        for (int l = 0; l < np; ++l) {
            const double p_l = sol.x[lay.p_var[l]];
            const double e_load = ins.load_p(net.pv_plants[l].bus) * u;
            const double tight = bill_value(p_l * u, e_load, cfg.c_im, cfg.c_fit);
            if (sol.x[lay.b_var[l]] > tight + kTightTol) res.epigraph_tight = false;
        }
        lay.h = h_now;
    }

    res.lp_status = sol.status;
    res.setpoints.resize(np);
    for (int l = 0; l < np; ++l) {
        const PvPlant& pl = net.pv_plants[l];
        PvSetpoint sp{sol.x[lay.p_var[l]], sol.x[lay.q_var[l]]};
        // exact envelope containment regardless of LP tolerance
        sp.p = std::clamp(sp.p, 0.0, ins.mpp_forecast[l]);
        const CapabilityCuts cuts = capability_cuts(pl.s_rated, cfg.k_segments);
        const QBounds qb = feasible_q_bounds(sp.p, pl.xi, cuts);
        sp.q = std::clamp(sp.q, qb.lo, qb.hi);
        res.setpoints[l] = sp;
    }
    res.gamma = lay.gamma_var >= 0 ? sol.x[lay.gamma_var] : 0.0;

    Eigen::VectorXd p_full = -ins.load_p, q_full = -ins.load_q;
    for (int l = 0; l < np; ++l) {
        p_full(net.pv_plants[l].bus) += res.setpoints[l].p;
        q_full(net.pv_plants[l].bus) += res.setpoints[l].q;
    }
    res.predicted_v = predict_voltages(*ins.sens, p_full, q_full);

    double obj = 0.0;
    for (int l = 0; l < np; ++l) {
        double f_l;
        if (bill) {
            const double e_load = ins.load_p(net.pv_plants[l].bus) * u;
            f_l = bill_value(res.setpoints[l].p * u, e_load, cfg.c_im, cfg.c_fit);
        } else {
            f_l = (ins.mpp_forecast[l] - res.setpoints[l].p) * u;
        }
        obj += ins.alpha[l] * f_l;
        if (lay.t_var[l] >= 0) {
            const HTerm& h = *lay.h[l];
            const double h_val = h.c0 + h.c1 * sol.x[h.var];
            obj += cfg.w * std::abs(res.gamma - h_val);
        }
    }
    res.objective_value = obj;
    return res;
}

}  // namespace faircurtail
