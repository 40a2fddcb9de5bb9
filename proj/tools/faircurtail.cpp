// Command-line front end: closed-loop runs and Pareto sweeps.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "faircurtail/errors.hpp"
#include "faircurtail/matpower.hpp"
#include "faircurtail/pareto.hpp"
#include "faircurtail/profiles.hpp"
#include "faircurtail/scenario.hpp"
#include "faircurtail/simulation.hpp"
#include "faircurtail/toml_lite.hpp"

namespace fc = faircurtail;

namespace {

struct Options {
    std::string config;
    std::string case_file;
    std::string scenario_file;
    std::string profiles_arg;  // path or synth:<seed>
    std::string objective = "curt";
    std::string variant = "unfair";
    double w = 0.0;
    int days = 1;
    std::string out = "out";
    int dt_minutes = 15;
    double v0 = 1.0;
    double v_min = 0.95, v_max = 1.05;
    double c_im = 0.3, c_fit = 0.1;
    double alpha_cap = 100.0;
    int k_segments = 8;
    bool dump_lp = false;
    bool dump_sens = false;
    std::string weights_arg;  // sweep only, comma-separated
};

void add_common_options(CLI::App* app, Options& o) {
    app->add_option("--config", o.config, "TOML-style config file mirroring the flags");
    app->add_option("--case", o.case_file, "network case file (.m)");
    app->add_option("--scenario", o.scenario_file, "PV/load scenario overlay (.toml)");
    app->add_option("--profiles", o.profiles_arg, "profiles CSV or synth:<seed>");
    app->add_option("--objective", o.objective, "bill|curt");
    app->add_option("--variant", o.variant, "unfair|F0P0|F0P1|F1P0|F1P1");
    app->add_option("--w", o.w, "fairness weight");
    app->add_option("--days", o.days, "simulated horizon in days");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--dt", o.dt_minutes, "timestep length in minutes");
    app->add_option("--v0", o.v0, "slack voltage magnitude, p.u.");
    app->add_option("--v-min", o.v_min, "lower voltage limit, p.u.");
    app->add_option("--v-max", o.v_max, "upper voltage limit, p.u.");
    app->add_option("--c-im", o.c_im, "import tariff, currency/kWh");
    app->add_option("--c-fit", o.c_fit, "feed-in tariff, currency/kWh");
    app->add_option("--alpha-cap", o.alpha_cap, "upper clamp for feedback weights");
    app->add_option("--k-segments", o.k_segments, "capability-circle cut count");
    app->add_flag("--dump-lp", o.dump_lp, "write per-step LP text to <out>/debug");
    app->add_flag("--dump-sensitivities", o.dump_sens,
                  "write per-step sensitivity CSVs to <out>/debug");
}

// config file supplies values only for flags the user did not pass
void merge_config(const CLI::App* app, Options& o) {
    if (o.config.empty()) return;
    std::ifstream in(o.config);
    if (!in) throw fc::ConfigError("cannot open config file: " + o.config);
    std::ostringstream ss;
    ss << in.rdbuf();
    const fc::TomlLite toml = fc::TomlLite::parse(ss.str());

    auto cli_set = [&](const std::string& flag) {
        const CLI::Option* opt = app->get_option_no_throw(flag);
        return opt != nullptr && opt->count() > 0;
    };
    auto s = [&](const char* flag, const char* key, std::string& dst) {
        if (!cli_set(flag) && toml.has(key)) dst = toml.string_or(key, dst);
    };
    auto d = [&](const char* flag, const char* key, double& dst) {
        if (!cli_set(flag)) dst = toml.number_or(key, dst);
    };
    auto i = [&](const char* flag, const char* key, int& dst) {
        if (!cli_set(flag)) dst = static_cast<int>(toml.number_or(key, dst));
    };
    s("--case", "case", o.case_file);
    s("--scenario", "scenario", o.scenario_file);
    s("--profiles", "profiles", o.profiles_arg);
    s("--objective", "objective", o.objective);
    s("--variant", "variant", o.variant);
    d("--w", "w", o.w);
    i("--days", "days", o.days);
    s("--out", "out", o.out);
    i("--dt", "dt_minutes", o.dt_minutes);
    d("--v0", "v0", o.v0);
    d("--v-min", "v_min", o.v_min);
    d("--v-max", "v_max", o.v_max);
    d("--c-im", "c_im", o.c_im);
    d("--c-fit", "c_fit", o.c_fit);
    d("--alpha-cap", "alpha_cap", o.alpha_cap);
    i("--k-segments", "k_segments", o.k_segments);
    if (!cli_set("--weights") && toml.has("weights")) {
        std::string joined;
        for (double wv : toml.number_list("weights")) {
            if (!joined.empty()) joined += ",";
            joined += std::to_string(wv);
        }
        o.weights_arg = joined;
    }
}

fc::Objective parse_objective(const std::string& s) {
    if (s == "bill") return fc::Objective::Bill;
    if (s == "curt") return fc::Objective::Curtailment;
    throw fc::ConfigError("unknown objective '" + s + "' (expected bill|curt)");
}

std::vector<double> parse_weight_list(const std::string& arg) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= arg.size()) {
        const size_t comma = arg.find(',', pos);
        const std::string item =
            arg.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) {
            char* end = nullptr;
            const double v = std::strtod(item.c_str(), &end);
            if (end == item.c_str() || *end != '\0')
                throw fc::ConfigError("bad weight '" + item + "' in --weights");
            out.push_back(v);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw fc::ConfigError("--weights needs at least one value");
    return out;
}

struct LoadedInputs {
    fc::Network net;
    fc::Profiles profiles;
};

LoadedInputs load_inputs(const Options& o) {
    if (o.case_file.empty()) throw fc::ConfigError("--case is required");
    if (o.scenario_file.empty()) throw fc::ConfigError("--scenario is required");
    if (o.profiles_arg.empty()) throw fc::ConfigError("--profiles is required");

    LoadedInputs li;
    const fc::Network raw = fc::load_case(o.case_file);
    const fc::Scenario sc = fc::load_scenario(o.scenario_file, raw.base_mva);
    li.net = fc::apply_scenario(raw, sc.pv, sc.load_scale);

    if (o.profiles_arg.rfind("synth:", 0) == 0) {
        const std::string seed_str = o.profiles_arg.substr(6);
        char* end = nullptr;
        const unsigned long long seed = std::strtoull(seed_str.c_str(), &end, 10);
        if (end == seed_str.c_str() || *end != '\0')
            throw fc::ConfigError("bad synth seed in --profiles " + o.profiles_arg);
        li.profiles = fc::synth_profiles(o.days, o.dt_minutes, seed);
    } else {
        li.profiles = fc::load_profiles_csv(o.profiles_arg, o.dt_minutes);
    }
    return li;
}

fc::RunConfig make_run_config(const Options& o) {
    fc::RunConfig cfg;
    cfg.dispatch.objective = parse_objective(o.objective);
    cfg.dispatch.w = o.w;
    cfg.dispatch.v_min = o.v_min;
    cfg.dispatch.v_max = o.v_max;
    cfg.dispatch.c_im = o.c_im;
    cfg.dispatch.c_fit = o.c_fit;
    cfg.dispatch.alpha_cap = o.alpha_cap;
    cfg.dispatch.k_segments = o.k_segments;
    cfg.variant = o.variant;
    cfg.days = o.days;
    cfg.v0 = o.v0;
    if (o.dump_lp || o.dump_sens) {
        cfg.dump_dir = o.out + "/debug";
        cfg.dump_lp = o.dump_lp;
        cfg.dump_sensitivities = o.dump_sens;
    }
    return cfg;
}

int cmd_run(const Options& o) {
    const LoadedInputs li = load_inputs(o);
    const fc::RunConfig cfg = make_run_config(o);
    const fc::RunReport rep = fc::run_simulation(li.net, cfg, li.profiles);
    fc::write_outputs(rep, li.net, o.out);
    const fc::DayMetrics& fin = rep.day_metrics.back();
    std::printf("%s w=%g day%d: curtail %.2f%%  jfi %.4f  gini %.4f  (outputs in %s)\n",
                rep.variant.c_str(), rep.w, fin.day, fin.curtail_pct, fin.jfi, fin.gini,
                o.out.c_str());
    return 0;
}

int cmd_sweep(const Options& o) {
    if (o.weights_arg.empty()) throw fc::ConfigError("--weights is required for sweep");
    const std::vector<double> weights = parse_weight_list(o.weights_arg);
    const LoadedInputs li = load_inputs(o);
    const fc::RunConfig cfg = make_run_config(o);
    const std::vector<fc::SweepRow> rows = fc::pareto_sweep(li.net, cfg, li.profiles, weights);

    std::filesystem::create_directories(o.out);
    {
        std::ofstream out(o.out + "/metrics.csv");
        if (!out) throw fc::ConfigError("cannot write " + o.out + "/metrics.csv");
        out << "day,variant,w,curtail_pct,jfi,gini\n";
        char buf[256];
        for (const fc::SweepRow& r : rows) {
            if (!r.ok) continue;
            std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%.17g,%.17g\n", r.day,
                          r.variant.c_str(), r.w, r.curtail_pct, r.jfi, r.gini);
            out << buf;
        }
    }
    {
        nlohmann::json j;
        j["objective"] = o.objective;
        j["days"] = o.days;
        nlohmann::json jrows = nlohmann::json::array();
        for (const fc::SweepRow& r : rows) {
            nlohmann::json jr = {{"variant", r.variant}, {"w", r.w}, {"ok", r.ok}};
            if (r.ok) {
                jr["day"] = r.day;
                jr["curtail_pct"] = r.curtail_pct;
                jr["jfi"] = r.jfi;
                jr["gini"] = r.gini;
            } else {
                jr["error"] = r.error;
            }
            jrows.push_back(jr);
        }
        j["rows"] = jrows;
        std::ofstream out(o.out + "/report.json");
        out << j.dump(2) << "\n";
    }
    int failures = 0;
    for (const fc::SweepRow& r : rows)
        if (!r.ok) {
            ++failures;
            std::fprintf(stderr, "sweep %s w=%g failed: %s\n", r.variant.c_str(), r.w,
                         r.error.c_str());
        }
    std::printf("sweep finished: %zu rows, %d failed (outputs in %s)\n", rows.size(),
                failures, o.out.c_str());
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fairness-aware PV curtailment simulator"};
    app.require_subcommand(1);

    Options run_opts, sweep_opts;
    CLI::App* run = app.add_subcommand("run", "single closed-loop simulation");
    add_common_options(run, run_opts);
    CLI::App* sweep = app.add_subcommand("sweep", "Pareto sweep over fairness weights");
    add_common_options(sweep, sweep_opts);
    sweep->add_option("--weights", sweep_opts.weights_arg,
                      "comma-separated fairness weights");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            merge_config(run, run_opts);
            return cmd_run(run_opts);
        }
        merge_config(sweep, sweep_opts);
        return cmd_sweep(sweep_opts);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
