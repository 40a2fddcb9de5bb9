#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "faircurtail/errors.hpp"
#include "faircurtail/matpower.hpp"
#include "faircurtail/network.hpp"
#include "faircurtail/scenario.hpp"
#include "faircurtail/toml_lite.hpp"
#include "support.hpp"

using namespace faircurtail;

namespace {

const char* kThreeBus = R"(function mpc = tiny
mpc.version = '2';
mpc.baseMVA = 10;
% comment line
mpc.bus = [
    1  3  0    0    0 0 1 1 0 12.66 1 1.05 0.95;
    2  1  100  60   0 0 1 1 0 12.66 1 1.05 0.95;
    5  1  90   40   0 0 1 1 0 12.66 1 1.05 0.95;
];
mpc.gen = [
    1 0 0 999 -999 1 10 1 999 -999 0 0 0 0 0 0 0 0 0 0 0;
];
mpc.branch = [
    1 2 0.01 0.02 0 999 999 999 0 0 1 -360 360;
    2 5 0.03 0.01 0 999 999 999 0 0 1 -360 360;
];
)";

bool same_network(const Network& a, const Network& b) {
    if (a.base_mva != b.base_mva || a.size() != b.size() ||
        a.branches.size() != b.branches.size() || a.slack_bus != b.slack_bus ||
        a.loads.size() != b.loads.size())
        return false;
    for (int i = 0; i < a.size(); ++i) {
        if (a.buses[i].ext_id != b.buses[i].ext_id) return false;
        if (a.buses[i].kind != b.buses[i].kind) return false;
        if (a.buses[i].base_kv != b.buses[i].base_kv) return false;
    }
    for (size_t i = 0; i < a.branches.size(); ++i) {
        const Branch &x = a.branches[i], &y = b.branches[i];
        if (x.from != y.from || x.to != y.to || x.r != y.r || x.x != y.x ||
            x.b_shunt != y.b_shunt)
            return false;
    }
    for (size_t i = 0; i < a.loads.size(); ++i) {
        const LoadPoint &x = a.loads[i], &y = b.loads[i];
        if (x.bus != y.bus || x.p_nom != y.p_nom || x.q_nom != y.q_nom) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("three-bus case text parses with renumbering and per-unit loads") {
    const Network net = parse_matpower(kThreeBus);
    CHECK(net.base_mva == 10.0);
    CHECK(net.size() == 3);
    CHECK(net.slack_bus == 0);
    CHECK(net.buses[0].kind == BusKind::Slack);
    CHECK(net.buses[2].ext_id == 5);
    CHECK(net.buses[2].index == 2);
    CHECK(net.index_of(5) == 2);
    CHECK(net.index_of(99) == -1);
    REQUIRE(net.loads.size() == 2);
    CHECK(net.loads[0].bus == 1);
    CHECK(net.loads[0].p_nom == doctest::Approx(10.0));  // 100 MW on 10 MVA base
    CHECK(net.loads[1].q_nom == doctest::Approx(4.0));
    REQUIRE(net.branches.size() == 2);
    CHECK(net.branches[1].from == 1);
    CHECK(net.branches[1].to == 2);
    CHECK(net.branches[1].r == 0.03);
}

TEST_CASE("shipped cases load and validate") {
    const Network c33 = load_case(data_path("cases/case33.m"));
    CHECK(c33.size() == 33);
    CHECK(c33.branches.size() == 32);
    double load_mw = 0.0;
    for (const LoadPoint& l : c33.loads) load_mw += l.p_nom * c33.base_mva;
    CHECK(load_mw == doctest::Approx(3.715).epsilon(1e-9));

    const Network c69 = load_case(data_path("cases/case69.m"));
    CHECK(c69.size() == 69);
    const Network c141 = load_case(data_path("cases/case141.m"));
    CHECK(c141.size() == 141);
    const Network cigre = load_case(data_path("cases/cigre_lv.m"));
    CHECK(cigre.size() == 19);
    // transformer branch is reactance-dominated
    CHECK(cigre.branches[0].x > 3.0 * cigre.branches[0].r);
}

TEST_CASE("parse-serialize-parse round-trips to an identical network") {
    for (const char* name : {"cases/case33.m", "cases/case69.m", "cases/case141.m",
                             "cases/cigre_lv.m"}) {
        const Network a = parse_matpower(read_file(data_path(name)));
        const Network b = parse_matpower(serialize_matpower(a));
        CAPTURE(name);
        CHECK(same_network(a, b));
    }
    const Network a = parse_matpower(kThreeBus);
    CHECK(same_network(a, parse_matpower(serialize_matpower(a))));
}

TEST_CASE("malformed case text is rejected with a line message") {
    CHECK_THROWS_AS(parse_matpower("mpc.bus = [1 2 3"), ParseError);
    CHECK_THROWS_AS(parse_matpower("function mpc = x\nmpc.branch = [];"), ParseError);
    CHECK_THROWS_WITH_AS(
        parse_matpower("function mpc = x\nmpc.baseMVA = 100;\nmpc.bus = [\n1 3 0 0 0 0 "
                       "1 1 0 12 1 1.05 0.95;\nbad\n];\nmpc.branch = [];"),
        doctest::Contains("line"), ParseError);
    // PV generator bus type is outside the supported subset
    std::string pv_bus = kThreeBus;
    const size_t pos = pv_bus.find("2  1  100");
    pv_bus.replace(pos, 9, "2  2  100");
    CHECK_THROWS_AS(parse_matpower(pv_bus), ParseError);
}

TEST_CASE("structural validation rejects broken networks") {
    Network net = parse_matpower(kThreeBus);
    SUBCASE("disconnected") {
        net.branches.pop_back();
        CHECK_THROWS_AS(net.validate(), ValidationError);
    }
    SUBCASE("duplicate ext id") {
        net.buses[2].ext_id = 2;
        CHECK_THROWS_AS(net.validate(), ValidationError);
    }
    SUBCASE("second slack") {
        net.buses[1].kind = BusKind::Slack;
        CHECK_THROWS_AS(net.validate(), ValidationError);
    }
    SUBCASE("zero impedance branch") {
        net.branches[0].r = 0.0;
        net.branches[0].x = 0.0;
        CHECK_THROWS_AS(net.validate(), ValidationError);
    }
    SUBCASE("plant on slack") {
        net.pv_plants.push_back({1, net.slack_bus, 0.1, 0.1, 0.33});
        CHECK_THROWS_AS(net.validate(), ValidationError);
    }
    SUBCASE("duplicate plant bus") {
        net.pv_plants.push_back({2, 1, 0.1, 0.1, 0.33});
        net.pv_plants.push_back({3, 1, 0.1, 0.1, 0.33});
        CHECK_THROWS_AS(net.validate(), ValidationError);
    }
}

TEST_CASE("admittance matrix matches hand-computed entries") {
    const Network net = parse_matpower(kThreeBus);
    const Eigen::MatrixXcd y = build_ybus(net);
    const std::complex<double> y01 = 1.0 / std::complex<double>(0.01, 0.02);
    CHECK(std::abs(y(0, 1) + y01) < 1e-12);
    CHECK(std::abs(y(0, 0) - y01) < 1e-12);
    // without shunts every row sums to zero
    for (int i = 0; i < 3; ++i) CHECK(std::abs(y.row(i).sum()) < 1e-9);
}

TEST_CASE("scenario overlay scales loads and attaches plants") {
    const Network net = parse_matpower(kThreeBus);
    const std::vector<PvSpec> pv = {{5, 0.05, 0.04, 0.33}};
    const Network applied = apply_scenario(net, pv, 0.5);
    CHECK(applied.loads[0].p_nom == doctest::Approx(5.0));
    REQUIRE(applied.pv_plants.size() == 1);
    CHECK(applied.pv_plants[0].bus == 2);
    CHECK(applied.pv_plants[0].id == 5);
    CHECK(applied.pv_plants[0].s_rated == 0.05);

    SUBCASE("scaling composes multiplicatively") {
        const Network ab = apply_scenario(apply_scenario(net, {}, 0.5), {}, 0.4);
        const Network once = apply_scenario(net, {}, 0.2);
        for (size_t i = 0; i < ab.loads.size(); ++i) {
            CHECK(ab.loads[i].p_nom == doctest::Approx(once.loads[i].p_nom));
            CHECK(ab.loads[i].q_nom == doctest::Approx(once.loads[i].q_nom));
        }
    }
    SUBCASE("zero scale keeps the network valid") {
        const Network z = apply_scenario(net, pv, 0.0);
        CHECK(z.loads[0].p_nom == 0.0);
        z.validate();
    }
    SUBCASE("unknown bus rejected") {
        CHECK_THROWS_AS(apply_scenario(net, {{77, 0.1, 0.1, 0.33}}, 1.0),
                        ValidationError);
    }
}

TEST_CASE("scenario files parse with unit conversion and defaults") {
    const char* text = R"(# demo scenario
load_scale = 0.4

[[pv]]
bus = 2
s_rated_kva = 500
p_capacity_kw = 450

[[pv]]
bus = 5
s_rated_kva = 600.0
p_capacity_kw = 550.0
xi = 0.2
)";
    const Scenario sc = parse_scenario(text, 10.0);  // 10 MVA base
    CHECK(sc.load_scale == 0.4);
    REQUIRE(sc.pv.size() == 2);
    CHECK(sc.pv[0].bus == 2);
    CHECK(sc.pv[0].s_rated == doctest::Approx(0.05));
    CHECK(sc.pv[0].p_capacity == doctest::Approx(0.045));
    CHECK(sc.pv[0].xi == doctest::Approx(0.33));
    CHECK(sc.pv[1].xi == doctest::Approx(0.2));
    CHECK_THROWS_AS(parse_scenario("[[pv]]\nbus = 1\n", 10.0), ParseError);
}

TEST_CASE("toml reader covers sections, arrays, lists, and errors") {
    const char* text = R"(
title = "abc"
w = 0.5
flag = true

[solver]
iters = 10

[[pv]]
bus = 3
[[pv]]
bus = 4
)";
    const TomlLite t = TomlLite::parse(text);
    CHECK(t.string_or("title", "") == "abc");
    CHECK(t.number("w") == 0.5);
    CHECK(t.boolean_or("flag", false));
    CHECK(t.number("solver.iters") == 10);
    REQUIRE(t.arrays.at("pv").size() == 2);
    CHECK(TomlLite::entry_number(t.arrays.at("pv")[1], "bus") == 4);
    CHECK(TomlLite::entry_number_or(t.arrays.at("pv")[0], "missing", 7.0) == 7.0);

    CHECK_THROWS_AS(TomlLite::parse("key value\n"), ParseError);
    CHECK_THROWS_AS(TomlLite{}.number("absent"), ParseError);
    const TomlLite lst = TomlLite::parse("ws = [0.1, 0.2, 0.3]\n");
    CHECK(lst.number_list("ws") == std::vector<double>{0.1, 0.2, 0.3});
}
