#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "faircurtail/dispatch.hpp"
#include "faircurtail/errors.hpp"
#include "faircurtail/power_flow.hpp"
#include "grid_oracle.hpp"

using namespace faircurtail;

namespace {

// Two-plant feeder chain: slack - bus1 - bus2 on resistive lines, sized so
// that full output overshoots a 1.03 p.u. ceiling even with maximum
// reactive absorption, forcing a genuine curtailment trade-off.
Network chain_network() {
    Network net;
    net.base_mva = 1.0;
    net.buses = {{0, 1, BusKind::Slack, 12.66},
                 {1, 2, BusKind::Pq, 12.66},
                 {2, 3, BusKind::Pq, 12.66}};
    net.branches = {{0, 1, 0.04, 0.02, 0.0}, {1, 2, 0.04, 0.02, 0.0}};
    net.slack_bus = 0;
    net.loads = {{1, 0.05, 0.01}, {2, 0.05, 0.01}};
    net.pv_plants = {{0, 1, 0.8, 0.6, 0.33}, {1, 2, 0.8, 0.6, 0.33}};
    net.validate();
    return net;
}

struct Fixture {
    Network net = chain_network();
    PfSolution base;
    SensitivityMatrices sens;
    TimestepInputs ins;

    Fixture() {
        base = solve_pf(net, base_injections(net), {1.0});
        sens = voltage_sensitivities(net, base);
        ins.sens = &sens;
        ins.load_p = Eigen::VectorXd::Zero(3);
        ins.load_q = Eigen::VectorXd::Zero(3);
        ins.load_p(1) = 0.05;
        ins.load_p(2) = 0.05;
        ins.load_q(1) = 0.01;
        ins.load_q(2) = 0.01;
        ins.mpp_forecast = {0.6, 0.6};
        ins.alpha = {1.0, 1.0};
        ins.history = {{}, {}};
    }
};

DispatchConfig tight_config() {
    DispatchConfig cfg;
    cfg.objective = Objective::Curtailment;
    cfg.v_min = 0.90;
    cfg.v_max = 1.03;
    cfg.energy_per_pu = 1.0;
    return cfg;
}

}  // namespace

TEST_CASE("bill accounting across the import/export boundary") {
    CHECK(bill_value(5.0, 2.0, 0.3, 0.1) == doctest::Approx(-0.3));
    CHECK(bill_value(0.0, 2.0, 0.3, 0.1) == doctest::Approx(0.6));
    CHECK(bill_value(2.0, 2.0, 0.3, 0.1) == doctest::Approx(0.0));
    // piecewise-linear and convex: slope c_im importing, c_fit exporting
    CHECK(bill_value(1.0, 2.0, 0.3, 0.1) == doctest::Approx(0.3));
    CHECK(bill_value(3.0, 2.0, 0.3, 0.1) == doctest::Approx(-0.1));
}

TEST_CASE("configuration validation rejects inconsistent settings") {
    DispatchConfig cfg = tight_config();
    CHECK_NOTHROW(cfg.validate());
    DispatchConfig bad = cfg;
    bad.w = -1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.v_min = 1.05;
    bad.v_max = 0.95;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.c_im = 0.05;  // below the feed-in tariff breaks bill convexity
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.energy_per_pu = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.k_segments = 1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("fairness ratio for generation follows current and cumulative forms") {
    Fixture fx;
    DispatchConfig cfg = tight_config();

    SUBCASE("instantaneous ratio is p over forecast") {
        const auto h = h_curt(cfg, fx.ins, 0);
        REQUIRE(h.has_value());
        CHECK(h->c0 == doctest::Approx(0.0));
        CHECK(h->c1 == doctest::Approx(1.0 / 0.6));
    }
    SUBCASE("night with no history drops the plant from the fairness rows") {
        fx.ins.mpp_forecast[0] = 0.0;
        CHECK_FALSE(h_curt(cfg, fx.ins, 0).has_value());
    }
    SUBCASE("cumulative form blends history with the current step") {
        cfg.past_aware = true;
        fx.ins.mpp_forecast[0] = 1.0;
        fx.ins.history[0] = {4.0, 5.0, 0.0, 0.0};  // 4 kWh realized of 5 possible
        const auto h = h_curt(cfg, fx.ins, 0);
        REQUIRE(h.has_value());
        // h(p) = (4 + p) / 6; full output p=0.6 gives 4.6/6
        CHECK(h->c0 + h->c1 * 0.6 == doctest::Approx(4.6 / 6.0));
        CHECK(h->c0 == doctest::Approx(4.0 / 6.0));
    }
    SUBCASE("cumulative night ratio stays defined once history exists") {
        cfg.past_aware = true;
        fx.ins.mpp_forecast[0] = 0.0;
        fx.ins.history[0] = {4.0, 5.0, 0.0, 0.0};
        const auto h = h_curt(cfg, fx.ins, 0);
        REQUIRE(h.has_value());
        CHECK(h->c0 == doctest::Approx(0.8));  // frozen at the historic ratio
    }
}

TEST_CASE("fairness ratio for bills divides by the potential bill") {
    Fixture fx;
    DispatchConfig cfg = tight_config();
    cfg.objective = Objective::Bill;

    SUBCASE("instantaneous form") {
        // potential bill at MPP 0.6, load 0.05: export 0.55 at the feed-in rate
        const auto h = h_bill(fx.net, cfg, fx.ins, 0);
        REQUIRE(h.has_value());
        CHECK(h->c0 == doctest::Approx(0.0));
        CHECK(h->c1 == doctest::Approx(1.0 / -0.055));
    }
    SUBCASE("balanced site has no usable ratio") {
        fx.ins.mpp_forecast[0] = 0.05;  // potential bill exactly zero
        CHECK_FALSE(h_bill(fx.net, cfg, fx.ins, 0).has_value());
    }
    SUBCASE("cumulative form reproduces the worked ratio") {
        cfg.past_aware = true;
        // history: earned 1.0 of a possible 2.0; current potential -0.5
        fx.ins.history[0] = {0.0, 0.0, -1.0, -2.0};
        fx.ins.mpp_forecast[0] = (0.5 / cfg.c_fit + 0.05);  // potential bill -0.5
        const auto h = h_bill(fx.net, cfg, fx.ins, 0);
        REQUIRE(h.has_value());
        CHECK(h->c0 + h->c1 * -0.5 == doctest::Approx(0.6));
    }
}

TEST_CASE("feedback weights invert the cumulative ratios with clamping") {
    DispatchConfig cfg = tight_config();

    SimulationLedger ledger(2);
    SUBCASE("empty history weights everyone equally") {
        const auto a = compute_alpha(ledger, cfg);
        CHECK(a == std::vector<double>{1.0, 1.0});
    }
    SUBCASE("feedback off ignores the ledger") {
        ledger.append({{0.5, 1.0, 0.0, 0.0}, {1.0, 1.0, 0.0, 0.0}});
        const auto a = compute_alpha(ledger, cfg);
        CHECK(a == std::vector<double>{1.0, 1.0});
    }
    SUBCASE("half-curtailed plant gets double weight") {
        cfg.feedback = true;
        ledger.append({{0.5, 1.0, 0.0, 0.0}, {1.0, 1.0, 0.0, 0.0}});
        const auto a = compute_alpha(ledger, cfg);
        CHECK(a[0] == doctest::Approx(2.0));
        CHECK(a[1] == doctest::Approx(1.0));
    }
    SUBCASE("fully curtailed plant saturates at the cap") {
        cfg.feedback = true;
        ledger.append({{0.0, 1.0, 0.0, 0.0}, {1.0, 1.0, 0.0, 0.0}});
        const auto a = compute_alpha(ledger, cfg);
        CHECK(a[0] == doctest::Approx(cfg.alpha_cap));
    }
    SUBCASE("bill objective uses the earnings ratio instead") {
        cfg.feedback = true;
        cfg.objective = Objective::Bill;
        ledger.append({{1.0, 1.0, -1.0, -2.0}, {1.0, 1.0, -2.0, -2.0}});
        const auto a = compute_alpha(ledger, cfg);
        CHECK(a[0] == doctest::Approx(2.0));
        CHECK(a[1] == doctest::Approx(1.0));
    }
}

TEST_CASE("generous voltage ceiling leaves production uncurtailed") {
    Fixture fx;
    DispatchConfig cfg = tight_config();
    cfg.v_max = 1.10;
    const DispatchResult res = dispatch_step(fx.net, cfg, fx.ins);
    REQUIRE(res.lp_status == LpStatus::Optimal);
    CHECK(res.setpoints[0].p == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(res.setpoints[1].p == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(res.objective_value == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("binding ceiling: curtailment happens and the constraint is active") {
    Fixture fx;
    const DispatchConfig cfg = tight_config();
    const DispatchResult res = dispatch_step(fx.net, cfg, fx.ins);
    REQUIRE(res.lp_status == LpStatus::Optimal);
    const double total = res.setpoints[0].p + res.setpoints[1].p;
    CHECK(total < 1.2 - 1e-4);
    CHECK(res.predicted_v.maxCoeff() == doctest::Approx(cfg.v_max).epsilon(1e-6));
    // the far plant moves the voltage more, so it bears more curtailment
    CHECK(res.setpoints[1].p < res.setpoints[0].p);
    // both plants absorb reactive power at the cone edge to create headroom
    CHECK(res.setpoints[0].q ==
          doctest::Approx(-0.33 * res.setpoints[0].p).epsilon(1e-6));
    CHECK(res.setpoints[1].q ==
          doctest::Approx(-0.33 * res.setpoints[1].p).epsilon(1e-6));
}

TEST_CASE("optimizer matches exhaustive search across every variant and weight") {
    Fixture fx;
    for (const Objective obj : {Objective::Curtailment, Objective::Bill}) {
        for (const bool feedback : {false, true}) {
            for (const bool past : {false, true}) {
                for (const double w : {0.0, 1.0, 10.0}) {
                    CAPTURE(static_cast<int>(obj));
                    CAPTURE(feedback);
                    CAPTURE(past);
                    CAPTURE(w);
                    DispatchConfig cfg = tight_config();
                    cfg.objective = obj;
                    cfg.feedback = feedback;
                    cfg.past_aware = past;
                    cfg.w = w;
                    TimestepInputs ins = fx.ins;
                    if (feedback) ins.alpha = {1.0, 2.5};
                    if (past) {
                        ins.history = {{3.0, 4.0, -0.9, -1.2},
                                       {1.5, 4.0, -0.45, -1.2}};
                    }
                    const DispatchResult res = dispatch_step(fx.net, cfg, ins);
                    REQUIRE(res.lp_status == LpStatus::Optimal);
                    const oracle::TwoPlantOracle ref(fx.net, cfg, ins);
                    const oracle::DispatchOptimum opt = ref.search();
                    REQUIRE(opt.feasible);
                    // optimizer may only do better than the discretized search
                    CHECK(res.objective_value <= opt.objective + 1e-6);
                    CHECK(opt.objective - res.objective_value < 1e-3);
                }
            }
        }
    }
}

TEST_CASE("a large fairness weight equalizes the curtailment ratios") {
    Fixture fx;
    DispatchConfig cfg = tight_config();
    cfg.w = 0.0;
    const DispatchResult uneven = dispatch_step(fx.net, cfg, fx.ins);
    const double h1_base = uneven.setpoints[0].p / 0.6;
    const double h2_base = uneven.setpoints[1].p / 0.6;
    CHECK(std::abs(h1_base - h2_base) > 0.05);  // the baseline is genuinely unfair

    cfg.w = 10.0;
    const DispatchResult fair = dispatch_step(fx.net, cfg, fx.ins);
    const double h1 = fair.setpoints[0].p / 0.6;
    const double h2 = fair.setpoints[1].p / 0.6;
    CHECK(std::abs(h1 - h2) <= 0.01);
    CHECK(fair.gamma == doctest::Approx(0.5 * (h1 + h2)).epsilon(0.02));
}

TEST_CASE("the fairness term can only increase total curtailment") {
    Fixture fx;
    DispatchConfig cfg = tight_config();
    const DispatchResult base = dispatch_step(fx.net, cfg, fx.ins);
    const double base_curt =
        1.2 - base.setpoints[0].p - base.setpoints[1].p;
    for (double w : {0.5, 2.0, 10.0}) {
        CAPTURE(w);
        cfg.w = w;
        const DispatchResult res = dispatch_step(fx.net, cfg, fx.ins);
        const double curt = 1.2 - res.setpoints[0].p - res.setpoints[1].p;
        CHECK(curt >= base_curt - 1e-9);
    }
}

TEST_CASE("identical problems are built for degenerate variant settings") {
    Fixture fx;
    // with w = 0 and no feedback history the three fairness-capable
    // configurations and the plain baseline produce the same program
    DispatchConfig plain = tight_config();
    DispatchConfig fb = plain;
    fb.feedback = true;  // no ledger yet, alpha stays 1
    DispatchConfig pa = plain;
    pa.past_aware = true;
    const LpProblem lp_plain = build_lp(fx.net, plain, fx.ins);
    const LpProblem lp_fb = build_lp(fx.net, fb, fx.ins);
    const LpProblem lp_pa = build_lp(fx.net, pa, fx.ins);
    CHECK(lp_plain.objective == lp_fb.objective);
    CHECK(lp_plain.objective == lp_pa.objective);
    CHECK(lp_plain.constraints.size() == lp_fb.constraints.size());
    CHECK(lp_plain.constraints.size() == lp_pa.constraints.size());
    // and no fairness machinery is present at w = 0
    CHECK(lp_plain.num_vars() == 4);  // p and q per plant only
}

TEST_CASE("scaling weights and fairness strength together changes nothing") {
    Fixture fx;
    DispatchConfig cfg = tight_config();
    cfg.w = 1.0;
    TimestepInputs ins = fx.ins;
    ins.alpha = {1.0, 2.5};
    const DispatchResult base = dispatch_step(fx.net, cfg, ins);

    DispatchConfig scaled = cfg;
    scaled.w = 3.0 * cfg.w;
    TimestepInputs ins3 = ins;
    ins3.alpha = {3.0, 7.5};
    const DispatchResult res = dispatch_step(fx.net, scaled, ins3);
    REQUIRE(res.lp_status == LpStatus::Optimal);
    for (int l = 0; l < 2; ++l) {
        CHECK(res.setpoints[l].p == doctest::Approx(base.setpoints[l].p).epsilon(1e-9));
        CHECK(res.setpoints[l].q == doctest::Approx(base.setpoints[l].q).epsilon(1e-9));
    }
    CHECK(res.objective_value == doctest::Approx(3.0 * base.objective_value));
}

TEST_CASE("returned setpoints respect the device envelope exactly") {
    Fixture fx;
    DispatchConfig cfg = tight_config();
    cfg.w = 1.0;
    const DispatchResult res = dispatch_step(fx.net, cfg, fx.ins);
    for (int l = 0; l < 2; ++l) {
        const PvPlant& plant = fx.net.pv_plants[l];
        const CapabilityCuts cuts = capability_cuts(plant.s_rated, cfg.k_segments);
        const PvSetpoint& sp = res.setpoints[l];
        CHECK(sp.p >= 0.0);
        CHECK(sp.p <= fx.ins.mpp_forecast[l]);
        CHECK(std::abs(sp.q) <= plant.xi * sp.p + 1e-12);
        for (const auto& [m, n] : cuts.segments) {
            CHECK(m * sp.p + sp.q <= n + 1e-12);
            CHECK(m * sp.p - sp.q <= n + 1e-12);
        }
    }
}

TEST_CASE("bill epigraph stays tight at the reported solution") {
    Fixture fx;
    DispatchConfig cfg = tight_config();
    cfg.objective = Objective::Bill;
    for (double w : {0.0, 1.0, 10.0, 50.0}) {
        CAPTURE(w);
        cfg.w = w;
        const DispatchResult res = dispatch_step(fx.net, cfg, fx.ins);
        REQUIRE(res.lp_status == LpStatus::Optimal);
        CHECK(res.epigraph_tight);
        CHECK(res.repairs <= 5);
    }
}

TEST_CASE("an unattainable voltage band is reported as a configuration problem") {
    Fixture fx;
    DispatchConfig cfg = tight_config();
    cfg.v_min = 0.90;
    cfg.v_max = 0.99;  // the load drop alone cannot pull voltages this low
    CHECK_THROWS_WITH_AS(dispatch_step(fx.net, cfg, fx.ins),
                         doctest::Contains("voltage band"), ConfigError);
}
